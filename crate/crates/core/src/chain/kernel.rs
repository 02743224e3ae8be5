use rayon::prelude::*;

use super::misexploit_prob;
use crate::error::{Error, Result};
use crate::game::{Game, DEFAULT_STATE_CAP};
use crate::noise::NoiseModel;

/// Rate-independent part of the kernel: for every chain state and player,
/// the action exploitation favours, the one it passes over, and the chance
/// the noisy comparison swaps them.
#[derive(Clone, Debug)]
pub struct KernelStructure {
    profiles: usize,
    players: usize,
    action_counts: Vec<usize>,
    /// `profiles x players` decoded actions.
    decoded: Vec<usize>,
    /// `states x players` entries of (winner, loser, delta).
    choice: Vec<(u32, u32, f64)>,
    noise: String,
}

impl KernelStructure {
    pub fn new(game: &Game, noise: &NoiseModel, cap: usize) -> Result<Self> {
        noise.validate(game.num_players())?;
        let profiles = game.require_profiles(cap, "profile space")?;
        let states = profiles.checked_mul(profiles).filter(|&z| z <= cap).ok_or_else(|| Error::Infeasible {
            what: "chain",
            size: format!("{profiles}^2"),
            cap,
        })?;
        let n = game.num_players();
        let mut decoded = vec![0usize; profiles * n];
        let mut utils = vec![0.0; profiles * n];
        for k in 0..profiles {
            game.decode_into(k, &mut decoded[k * n..(k + 1) * n]);
            for i in 0..n {
                utils[k * n + i] = game.utility_at(i, k);
            }
        }
        let mut choice = Vec::with_capacity(states * n);
        for z in 0..states {
            let (s0, s1) = (z / profiles, z % profiles);
            for i in 0..n {
                let (a0, a1) = (decoded[s0 * n + i], decoded[s1 * n + i]);
                let (u0, u1) = (utils[s0 * n + i], utils[s1 * n + i]);
                let entry = if a0 == a1 {
                    (a0 as u32, a0 as u32, 0.0)
                } else if u1 >= u0 {
                    (a1 as u32, a0 as u32, misexploit_prob(&noise.kind(i), u0 - u1)?)
                } else {
                    (a0 as u32, a1 as u32, misexploit_prob(&noise.kind(i), u1 - u0)?)
                };
                choice.push(entry);
            }
        }
        Ok(KernelStructure {
            profiles,
            players: n,
            action_counts: game.action_counts(),
            decoded,
            choice,
            noise: noise.describe(),
        })
    }

    pub fn profiles(&self) -> usize {
        self.profiles
    }

    pub fn states(&self) -> usize {
        self.profiles * self.profiles
    }

    pub fn players(&self) -> usize {
        self.players
    }

    /// (winner, loser, delta) of `player` in chain state `z`.
    pub fn choice(&self, z: usize, player: usize) -> (usize, usize, f64) {
        let (w, l, d) = self.choice[z * self.players + player];
        (w as usize, l as usize, d)
    }

    /// Action of `player` in profile index `s`.
    pub fn action(&self, s: usize, player: usize) -> usize {
        self.decoded[s * self.players + player]
    }

    pub fn check_rates(&self, rates: &[f64]) -> Result<()> {
        if rates.len() != self.players {
            return Err(Error::Dimension(format!("{} rates for {} players", rates.len(), self.players)));
        }
        match rates.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
            Some(&r) => Err(Error::RateOutOfRange(r)),
            None => Ok(()),
        }
    }

    /// Per-player next-action probabilities from state `z`, written into
    /// `out` at `offsets[i]..offsets[i] + |A_i|`.
    pub(crate) fn player_laws(&self, z: usize, rates: &[f64], offsets: &[usize], out: &mut [f64]) {
        for i in 0..self.players {
            let m = self.action_counts[i];
            let r = rates[i];
            let law = &mut out[offsets[i]..offsets[i] + m];
            law.fill(r / m as f64);
            let (w, l, d) = self.choice(z, i);
            if w == l {
                law[w] += 1.0 - r;
            } else {
                law[w] += (1.0 - d) * (1.0 - r);
                law[l] += d * (1.0 - r);
            }
        }
    }

    pub(crate) fn law_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.players + 1);
        let mut acc = 0;
        for &m in &self.action_counts {
            offsets.push(acc);
            acc += m;
        }
        offsets.push(acc);
        offsets
    }

    /// Probabilities of every next profile `s2` from state `z`.
    pub(crate) fn fill_row(&self, z: usize, rates: &[f64], offsets: &[usize], laws: &mut [f64], row: &mut [f64]) {
        self.player_laws(z, rates, offsets, laws);
        let n = self.players;
        for (s2, cell) in row.iter_mut().enumerate() {
            let acts = &self.decoded[s2 * n..(s2 + 1) * n];
            *cell = acts.iter().enumerate().map(|(i, &a)| laws[offsets[i] + a]).product();
        }
    }

    pub fn matrix(&self, rates: &[f64]) -> Result<TransitionMatrix> {
        self.check_rates(rates)?;
        let s = self.profiles;
        let offsets = self.law_offsets();
        let mut data = vec![0.0; self.states() * s];
        data.par_chunks_mut(s).enumerate().for_each_init(
            || vec![0.0; *offsets.last().unwrap()],
            |laws, (z, row)| self.fill_row(z, rates, &offsets, laws, row),
        );
        let m = TransitionMatrix { size: self.states(), stride: Some(s), data, rates: rates.to_vec(), noise: self.noise.clone() };
        m.check_rows()?;
        Ok(m)
    }
}

/// Row-stochastic kernel. Kernels built from a game only store the
/// structurally feasible block of each row: from `(s0, s1)` the chain can
/// only reach `(s1, s2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    size: usize,
    /// `Some(|S|)` for game kernels, `None` for dense ones.
    stride: Option<usize>,
    data: Vec<f64>,
    rates: Vec<f64>,
    noise: String,
}

pub fn transition_matrix(game: &Game, rates: &[f64], noise: &NoiseModel) -> Result<TransitionMatrix> {
    transition_matrix_with_cap(game, rates, noise, DEFAULT_STATE_CAP)
}

pub fn transition_matrix_with_cap(game: &Game, rates: &[f64], noise: &NoiseModel, cap: usize) -> Result<TransitionMatrix> {
    if rates.len() != game.num_players() {
        return Err(Error::Dimension(format!("{} rates for {} players", rates.len(), game.num_players())));
    }
    if let Some(&r) = rates.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
        return Err(Error::RateOutOfRange(r));
    }
    KernelStructure::new(game, noise, cap)?.matrix(rates)
}

impl TransitionMatrix {
    /// Arbitrary kernel; rows must be nonnegative and sum to 1 within 1e-12.
    pub fn from_dense(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidKernel("kernel must be a nonempty square matrix".into()));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if let Some(p) = data.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidKernel(format!("entry {p} is not a finite nonnegative number")));
        }
        let m = TransitionMatrix { size: n, stride: None, data, rates: Vec::new(), noise: String::new() };
        m.check_rows()?;
        Ok(m)
    }

    fn check_rows(&self) -> Result<()> {
        for z in 0..self.size {
            let sum: f64 = self.row(z).1.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidKernel(format!("row {z} sums to {sum}")));
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Rates the kernel was built with (empty for hand-made kernels).
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn noise(&self) -> &str {
        &self.noise
    }

    /// `Some(|S|)` when built from a game.
    pub fn profile_count(&self) -> Option<usize> {
        self.stride
    }

    /// Stored block of row `z`: the first target index and the contiguous
    /// probabilities from there. Entries outside the block are zero.
    pub fn row(&self, z: usize) -> (usize, &[f64]) {
        match self.stride {
            Some(s) => ((z % s) * s, &self.data[z * s..(z + 1) * s]),
            None => (0, &self.data[z * self.size..(z + 1) * self.size]),
        }
    }

    pub fn successors(&self, z: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (first, vals) = self.row(z);
        vals.iter().enumerate().filter(|(_, p)| **p > 0.0).map(move |(k, &p)| (first + k, p))
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        let (first, vals) = self.row(from);
        if to >= first && to < first + vals.len() {
            vals[to - first]
        } else {
            0.0
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.size)
            .map(|z| {
                let mut r = vec![0.0; self.size];
                let (first, vals) = self.row(z);
                r[first..first + vals.len()].copy_from_slice(vals);
                r
            })
            .collect()
    }

    /// `pi^T P`.
    pub fn left_multiply(&self, pi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        for (z, &w) in pi.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let (first, vals) = self.row(z);
            for (o, &p) in out[first..first + vals.len()].iter_mut().zip(vals) {
                *o += w * p;
            }
        }
        out
    }
}
