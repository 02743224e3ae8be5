//! The payoff-based reinforcement-learning dynamics.
//!
//! Each player only ever sees its own two most recent actions and the two
//! utility values it received for them ([`LearnerState`]). With probability
//! `1 - rate` it replays whichever of those two actions scored higher (ties
//! go to the more recent one); otherwise it samples uniformly from its whole
//! action set. The first two iterations are uniform draws.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{Game, Profile};
use crate::noise::NoiseModel;
use crate::rng::{run_seed, substream, Purpose};
use crate::schedule::Schedule;

/// Everything a learner is allowed to know.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LearnerState {
    /// `[a(t-2), a(t-1)]`.
    last_actions: [usize; 2],
    /// `[u~(t-2), u~(t-1)]`.
    last_utilities: [f64; 2],
}

impl LearnerState {
    pub fn new(older: (usize, f64), recent: (usize, f64)) -> Self {
        LearnerState { last_actions: [older.0, recent.0], last_utilities: [older.1, recent.1] }
    }

    pub fn last_actions(&self) -> [usize; 2] {
        self.last_actions
    }

    pub fn last_utilities(&self) -> [f64; 2] {
        self.last_utilities
    }

    /// Shifts in the newest (action, received utility) pair.
    pub fn record(&mut self, action: usize, utility: f64) {
        self.last_actions = [self.last_actions[1], action];
        self.last_utilities = [self.last_utilities[1], utility];
    }

    /// The action replayed when not exploring.
    pub fn exploit_choice(&self) -> usize {
        if self.last_utilities[1] >= self.last_utilities[0] {
            self.last_actions[1]
        } else {
            self.last_actions[0]
        }
    }
}

/// One decision. `coin` decides explore vs. exploit and `explore` supplies
/// the uniform sample; keeping them apart makes the choice a pure function
/// of the state and the two streams.
pub fn rl_step<C, E>(state: &LearnerState, rate: f64, action_count: usize, coin: &mut C, explore: &mut E) -> Result<usize>
where
    C: Rng + ?Sized,
    E: Rng + ?Sized,
{
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::RateOutOfRange(rate));
    }
    if coin.random::<f64>() < rate {
        Ok(explore.random_range(0..action_count))
    } else {
        Ok(state.exploit_choice())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub num_players: usize,
    pub horizon: u64,
    /// Row-major `(horizon + 1) x num_players` action indices.
    pub profiles: Vec<usize>,
    /// Row-major `(horizon + 1) x num_players` received utilities.
    pub received: Vec<f64>,
    pub seed: u64,
    pub schedule: String,
    pub noise: String,
}

impl Trajectory {
    pub fn profile(&self, t: u64) -> &[usize] {
        let n = self.num_players;
        &self.profiles[t as usize * n..(t as usize + 1) * n]
    }

    pub fn action(&self, t: u64, player: usize) -> usize {
        self.profiles[t as usize * self.num_players + player]
    }

    pub fn received_utility(&self, t: u64, player: usize) -> f64 {
        self.received[t as usize * self.num_players + player]
    }

    pub fn len(&self) -> usize {
        self.horizon as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

struct PlayerStreams {
    init: ChaCha8Rng,
    coin: ChaCha8Rng,
    explore: ChaCha8Rng,
    noise: ChaCha8Rng,
}

impl PlayerStreams {
    fn new(seed: u64, player: usize) -> Self {
        PlayerStreams {
            init: substream(seed, player, Purpose::Init),
            coin: substream(seed, player, Purpose::Coin),
            explore: substream(seed, player, Purpose::Explore),
            noise: substream(seed, player, Purpose::Noise),
        }
    }
}

fn check_inputs(game: &Game, schedule: &Schedule, noise: &NoiseModel) -> Result<()> {
    if schedule.num_players() != game.num_players() {
        return Err(Error::Dimension(format!(
            "schedule has {} players, game has {}",
            schedule.num_players(),
            game.num_players()
        )));
    }
    noise.validate(game.num_players())
}

/// One run of the dynamics for iterations `0..=horizon`, synchronous: all
/// players commit to an action before anyone receives a utility.
pub fn simulate(game: &Game, schedule: &Schedule, noise: &NoiseModel, horizon: u64, seed: u64) -> Result<Trajectory> {
    check_inputs(game, schedule, noise)?;
    if horizon < 2 {
        return Err(Error::Precondition("horizon must be at least 2".into()));
    }
    let n = game.num_players();
    let counts = game.action_counts();
    let mut streams: Vec<PlayerStreams> = (0..n).map(|i| PlayerStreams::new(seed, i)).collect();
    let len = horizon as usize + 1;
    let mut profiles = vec![0usize; len * n];
    let mut received = vec![0.0; len * n];
    let mut states: Vec<LearnerState> = Vec::with_capacity(n);
    let mut utilities = vec![0.0; n];

    for t in 0..=horizon {
        let row = t as usize * n;
        for i in 0..n {
            let s = &mut streams[i];
            profiles[row + i] = if t < 2 {
                s.init.random_range(0..counts[i])
            } else {
                let rate = schedule.effective_rate(i, t)?;
                rl_step(&states[i], rate, counts[i], &mut s.coin, &mut s.explore)?
            };
        }
        game.utilities(&profiles[row..row + n], &mut utilities);
        for i in 0..n {
            let u = utilities[i] + noise.kind(i).sample(t, &mut streams[i].noise);
            received[row + i] = u;
            match t {
                0 => {}
                1 => states.push(LearnerState::new((profiles[i], received[i]), (profiles[row + i], u))),
                _ => states[i].record(profiles[row + i], u),
            }
        }
    }

    Ok(Trajectory {
        num_players: n,
        horizon,
        profiles,
        received,
        seed,
        schedule: schedule.describe(),
        noise: noise.describe(),
    })
}

/// Independent runs with seeds `base_seed + k`, returned in run order.
pub fn simulate_runs(
    game: &Game,
    schedule: &Schedule,
    noise: &NoiseModel,
    horizon: u64,
    runs: usize,
    base_seed: u64,
) -> Result<Vec<Trajectory>> {
    if runs == 0 {
        return Err(Error::Precondition("at least one run is required".into()));
    }
    (0..runs)
        .into_par_iter()
        .map(|k| simulate(game, schedule, noise, horizon, run_seed(base_seed, k)))
        .collect()
}

/// Cross-run frequencies per iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    pub runs: usize,
    pub horizon: u64,
    pub action_counts: Vec<usize>,
    offsets: Vec<usize>,
    /// `(horizon + 1) x sum_i |A_i|` action frequencies.
    action_freq: Vec<f64>,
    /// Profile-index counts per iteration; absent when |S| overflows.
    profile_counts: Option<Vec<BTreeMap<usize, u32>>>,
}

impl EmpiricalDistribution {
    pub fn from_trajectories(game: &Game, trajectories: &[Trajectory]) -> Result<Self> {
        let first = trajectories.first().ok_or_else(|| Error::Precondition("no trajectories".into()))?;
        let horizon = first.horizon;
        if trajectories.iter().any(|t| t.horizon != horizon || t.num_players != game.num_players()) {
            return Err(Error::Dimension("trajectories disagree on horizon or player count".into()));
        }
        let action_counts = game.action_counts();
        let mut offsets = Vec::with_capacity(action_counts.len() + 1);
        let mut acc = 0;
        for &c in &action_counts {
            offsets.push(acc);
            acc += c;
        }
        offsets.push(acc);
        let width = acc;
        let len = horizon as usize + 1;
        let mut counts = vec![0u32; len * width];
        let mut profile_counts = game.profile_count().map(|_| vec![BTreeMap::new(); len]);
        for tr in trajectories {
            for t in 0..len {
                let p = tr.profile(t as u64);
                for (i, &a) in p.iter().enumerate() {
                    counts[t * width + offsets[i] + a] += 1;
                }
                if let Some(pc) = profile_counts.as_mut() {
                    *pc[t].entry(game.index_of(p)).or_insert(0) += 1;
                }
            }
        }
        let runs = trajectories.len();
        let action_freq = counts.into_iter().map(|c| c as f64 / runs as f64).collect();
        Ok(EmpiricalDistribution { runs, horizon, action_counts, offsets, action_freq, profile_counts })
    }

    pub fn action_frequency(&self, t: u64, player: usize, action: usize) -> f64 {
        let width = *self.offsets.last().unwrap();
        self.action_freq[t as usize * width + self.offsets[player] + action]
    }

    /// Frequencies of every action of `player` at iteration t.
    pub fn player_frequencies(&self, t: u64, player: usize) -> &[f64] {
        let width = *self.offsets.last().unwrap();
        let base = t as usize * width;
        &self.action_freq[base + self.offsets[player]..base + self.offsets[player + 1]]
    }

    pub fn profile_frequency(&self, game: &Game, t: u64, profile: &Profile) -> Option<f64> {
        let pc = self.profile_counts.as_ref()?;
        let c = pc[t as usize].get(&game.index_of(profile.actions())).copied().unwrap_or(0);
        Some(c as f64 / self.runs as f64)
    }

    /// Nonzero (profile index, frequency) pairs at iteration t.
    pub fn profile_frequencies(&self, t: u64) -> Option<Vec<(usize, f64)>> {
        let pc = self.profile_counts.as_ref()?;
        Some(pc[t as usize].iter().map(|(&k, &c)| (k, c as f64 / self.runs as f64)).collect())
    }
}

pub fn replicate(
    game: &Game,
    schedule: &Schedule,
    noise: &NoiseModel,
    horizon: u64,
    runs: usize,
    base_seed: u64,
) -> Result<EmpiricalDistribution> {
    let trajectories = simulate_runs(game, schedule, noise, horizon, runs, base_seed)?;
    EmpiricalDistribution::from_trajectories(game, &trajectories)
}

/// Draws the next profile from a fixed chain state `(prev, curr)` at fixed
/// rates. Received utilities for `prev` and `curr` get fresh noise on every
/// call. Used to check analytic kernel rows against the dynamics.
pub struct OneStepSampler {
    streams: Vec<PlayerStreams>,
}

impl OneStepSampler {
    pub fn new(players: usize, seed: u64) -> Self {
        OneStepSampler { streams: (0..players).map(|i| PlayerStreams::new(seed, i)).collect() }
    }

    pub fn sample(
        &mut self,
        game: &Game,
        noise: &NoiseModel,
        rates: &[f64],
        prev: &[usize],
        curr: &[usize],
        out: &mut [usize],
    ) -> Result<()> {
        let n = game.num_players();
        let mut u_prev = vec![0.0; n];
        let mut u_curr = vec![0.0; n];
        game.utilities(prev, &mut u_prev);
        game.utilities(curr, &mut u_curr);
        for i in 0..n {
            let s = &mut self.streams[i];
            let kind = noise.kind(i);
            let older = (prev[i], u_prev[i] + kind.sample(0, &mut s.noise));
            let recent = (curr[i], u_curr[i] + kind.sample(1, &mut s.noise));
            let state = LearnerState::new(older, recent);
            out[i] = rl_step(&state, rates[i], game.action_count(i), &mut s.coin, &mut s.explore)?;
        }
        Ok(())
    }
}
