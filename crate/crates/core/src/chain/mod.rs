//! Exact analysis of the Markov chain the dynamics induce on pairs of
//! consecutive profiles.
//!
//! A chain state `z = (s(t), s(t+1))` is stored as the index
//! `prev_index * |S| + curr_index`. The learners' memory is exactly the last
//! two profiles and their utilities, so under time-invariant noise the next
//! profile only depends on `z` and the current exploration rates.

mod arborescence;
mod evolve;
mod kernel;
mod potential;
mod stationary;

pub use arborescence::{all_roots_min_in_tree, exhaustive_min_in_tree, for_each_in_tree, MAX_ORACLE_STATES};
pub use evolve::{evolve, evolve_each};
pub use kernel::{transition_matrix, transition_matrix_with_cap, KernelStructure, TransitionMatrix};
pub use potential::{
    best_path_prob, resistance_potential, stable_states, stochastic_potential, PotentialMethod, PotentialReport,
    ResistanceReport, StabilityReport, STABILITY_RUNGS,
};
pub use stationary::{stationary_linear, stationary_tree};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Game, Profile};
use crate::noise::NoiseKind;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ChainState {
    /// s(t)
    pub prev: Profile,
    /// s(t+1)
    pub curr: Profile,
}

impl ChainState {
    pub fn new(game: &Game, prev: Profile, curr: Profile) -> Result<Self> {
        game.validate_profile(prev.actions())?;
        game.validate_profile(curr.actions())?;
        Ok(ChainState { prev, curr })
    }

    pub fn index(&self, game: &Game) -> usize {
        let s = game.profile_count().expect("chain states need an enumerable profile space");
        game.index_of(self.prev.actions()) * s + game.index_of(self.curr.actions())
    }

    pub fn from_index(game: &Game, index: usize) -> Self {
        let s = game.profile_count().expect("chain states need an enumerable profile space");
        ChainState { prev: game.profile_at(index / s), curr: game.profile_at(index % s) }
    }

    /// On the diagonal of S x S: the same profile twice in a row.
    pub fn is_diagonal(&self) -> bool {
        self.prev == self.curr
    }
}

/// Probability vector over chain states (or any finite state set).
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidArgument("empty distribution".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidArgument(format!("probability {p} is not a finite nonnegative number")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("probabilities sum to {sum}")));
        }
        Ok(Distribution { probs })
    }

    /// Rescales nonnegative weights to sum to one.
    pub fn from_weights(mut weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(Error::InvalidArgument(format!("weights sum to {sum}")));
        }
        weights.iter_mut().for_each(|w| *w /= sum);
        Distribution::new(weights)
    }

    pub fn uniform(n: usize) -> Self {
        Distribution { probs: vec![1.0 / n as f64; n] }
    }

    pub fn point(n: usize, at: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Distribution { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn l1_distance(&self, other: &Distribution) -> f64 {
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum()
    }

    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        Distribution { probs }
    }
}

/// L1 distance of every distribution in `pis` to `limit`.
pub fn distance_trace(pis: &[Distribution], limit: &Distribution) -> Result<Vec<f64>> {
    pis.iter()
        .map(|p| {
            if p.len() != limit.len() {
                return Err(Error::Dimension(format!("distribution of length {} vs limit of length {}", p.len(), limit.len())));
            }
            Ok(p.l1_distance(limit))
        })
        .collect()
}

/// `Pr{W < delta_u}` for `W` the difference of two independent draws of
/// `noise`. With `delta_u = u(loser) - u(winner)` this is the chance that
/// the noisy comparison picks the wrong action.
pub fn misexploit_prob(noise: &NoiseKind, delta_u: f64) -> Result<f64> {
    noise.validate()?;
    match *noise {
        NoiseKind::GrowingUniform { scale } if scale > 0.0 => {
            Err(Error::UnsupportedNoise("time-dependent noise has no stationary kernel".into()))
        }
        NoiseKind::Uniform { bound } if bound > 0.0 => {
            let e = bound;
            let x = delta_u;
            Ok(if x <= -2.0 * e {
                0.0
            } else if x <= 0.0 {
                (x + 2.0 * e).powi(2) / (8.0 * e * e)
            } else if x < 2.0 * e {
                1.0 - (2.0 * e - x).powi(2) / (8.0 * e * e)
            } else {
                1.0
            })
        }
        NoiseKind::Gaussian { sigma } if sigma > 0.0 => {
            let z = delta_u / (2.0 * sigma);
            Ok(0.5 * (1.0 + statrs::function::erf::erf(z)))
        }
        _ => Ok(if delta_u > 0.0 { 1.0 } else { 0.0 }),
    }
}
