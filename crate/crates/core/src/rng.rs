//! Seed plumbing.
//!
//! A run seed selects a ChaCha8 key; every (player, purpose) pair reads from
//! its own ChaCha stream under that key, so exploration coins, uniform
//! samples and noise draws never share state. Stream id layout:
//! `player << 2 | purpose`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    /// Uniform draws at t = 0 and t = 1.
    Init = 0,
    /// Explore-or-exploit coin.
    Coin = 1,
    /// Uniform action sample when exploring.
    Explore = 2,
    Noise = 3,
}

pub fn substream(seed: u64, player: usize, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((player as u64) << 2) | purpose as u64);
    rng
}

/// Seed of replication k under `base_seed`.
pub fn run_seed(base_seed: u64, run: usize) -> u64 {
    base_seed.wrapping_add(run as u64)
}
