use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use super::arborescence::all_roots_min_in_tree;
use super::kernel::{KernelStructure, TransitionMatrix};
use crate::error::{Error, Result};
use crate::game::{Game, DEFAULT_STATE_CAP};
use crate::noise::NoiseModel;

/// Λ* is declared once this many trailing rungs agree.
pub const STABILITY_RUNGS: usize = 3;

/// Kernels up to this size get the explicit best-path closure; larger ones
/// are solved on their own edges, which yields the same optimum.
const CLOSURE_LIMIT: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialMethod {
    /// Trees over the complete graph of best-path probabilities.
    Closure,
    /// Trees over the kernel's own positive entries.
    Direct,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PotentialReport {
    /// Natural log of the largest tree weight rooted at each state.
    pub log_potential: Vec<f64>,
    /// States within `tolerance` of the maximum, ascending.
    pub lambda: Vec<usize>,
    pub tolerance: f64,
    pub method: PotentialMethod,
}

impl PotentialReport {
    pub fn max_log_potential(&self) -> f64 {
        self.log_potential.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Copy)]
struct Cost(f64);

impl PartialEq for Cost {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn dijkstra(p: &TransitionMatrix, from: usize) -> Vec<f64> {
    let n = p.size();
    let mut dist = vec![f64::INFINITY; n];
    dist[from] = 0.0;
    let mut queue = BinaryHeap::new();
    queue.push(Reverse((Cost(0.0), from)));
    while let Some(Reverse((Cost(d), v))) = queue.pop() {
        if d > dist[v] {
            continue;
        }
        for (u, prob) in p.successors(v) {
            let nd = d - prob.ln();
            if nd < dist[u] {
                dist[u] = nd;
                queue.push(Reverse((Cost(nd), u)));
            }
        }
    }
    dist
}

/// Log of the most probable path's probability from `from` to `to`.
/// Probabilities are at most one, so repeating a vertex never helps and a
/// shortest path under `-ln p` is the answer.
pub fn best_path_prob(p: &TransitionMatrix, from: usize, to: usize) -> Result<f64> {
    if from == to {
        return Err(Error::Precondition("best path needs distinct endpoints".into()));
    }
    if from >= p.size() || to >= p.size() {
        return Err(Error::Dimension(format!("state out of range for a kernel of size {}", p.size())));
    }
    Ok(-dijkstra(p, from)[to])
}

fn argmax_set(values: &[f64]) -> (Vec<usize>, f64) {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * max.abs().max(1.0);
    ((0..values.len()).filter(|&z| values[z] >= max - tol).collect(), tol)
}

/// Largest-weight spanning tree into every state, where the weight of the
/// edge z' -> z is the best-path probability from z' to z.
pub fn stochastic_potential(p: &TransitionMatrix) -> Result<PotentialReport> {
    let n = p.size();
    let (method, edges) = if n <= CLOSURE_LIMIT {
        let mut edges = Vec::with_capacity(n * n);
        for v in 0..n {
            let dist = dijkstra(p, v);
            for (u, &d) in dist.iter().enumerate() {
                if u != v && d.is_finite() {
                    edges.push((v, u, d));
                }
            }
        }
        (PotentialMethod::Closure, edges)
    } else {
        let edges = (0..n)
            .flat_map(|v| p.successors(v).filter(move |&(u, _)| u != v).map(move |(u, prob)| (v, u, -prob.ln())))
            .collect::<Vec<_>>();
        (PotentialMethod::Direct, edges)
    };
    let costs = all_roots_min_in_tree(n, &edges)
        .map_err(|e| Error::Precondition(format!("kernel is not ergodic: {e}")))?;
    let log_potential: Vec<f64> = costs.into_iter().map(|c| -c).collect();
    let (lambda, tolerance) = argmax_set(&log_potential);
    Ok(PotentialReport { log_potential, lambda, tolerance, method })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResistanceReport {
    /// Minimum total resistance of a tree into each state.
    pub resistance: Vec<u32>,
    /// States attaining the minimum, ascending.
    pub minimizers: Vec<usize>,
}

/// Zero-noise resistance trees. A transition's resistance is the number of
/// players whose next action differs from the one exploitation picks, i.e.
/// the power of the exploration rate in its probability.
pub fn resistance_potential(game: &Game, cap: usize) -> Result<ResistanceReport> {
    let k = KernelStructure::new(game, &NoiseModel::zero(), cap)?;
    let s = k.profiles();
    let n = game.num_players();
    let mut edges = Vec::with_capacity(k.states() * s);
    for z in 0..k.states() {
        let base = (z % s) * s;
        for s2 in 0..s {
            let to = base + s2;
            if to == z {
                continue;
            }
            let r = (0..n).filter(|&i| k.action(s2, i) != k.choice(z, i).0).count();
            edges.push((z, to, r as f64));
        }
    }
    let costs = all_roots_min_in_tree(k.states(), &edges)?;
    let resistance: Vec<u32> = costs.iter().map(|c| c.round() as u32).collect();
    let min = *resistance.iter().min().unwrap();
    let minimizers = (0..resistance.len()).filter(|&z| resistance[z] == min).collect();
    Ok(ResistanceReport { resistance, minimizers })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    /// Common exploration rates, strictly decreasing.
    pub ladder: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Λ at every rung.
    pub lambdas: Vec<Vec<usize>>,
    /// Potentials at the last rung.
    pub final_report: PotentialReport,
    /// `Some` once the trailing rungs agree; `None` means inconclusive.
    pub lambda_star: Option<Vec<usize>>,
    /// Zero-noise cross-check.
    pub resistance: Option<ResistanceReport>,
    /// Λ* contained in the minimum-resistance set (zero noise only).
    pub resistance_agrees: Option<bool>,
}

impl StabilityReport {
    pub fn stabilized(&self) -> bool {
        self.lambda_star.is_some()
    }
}

/// Λ(ε̃) along a ladder of common rates with ε̃_i = γ_i ε and no
/// deviation term.
pub fn stable_states(game: &Game, noise: &NoiseModel, ladder: &[f64], gamma: &[f64]) -> Result<StabilityReport> {
    if ladder.len() < STABILITY_RUNGS + 1 {
        return Err(Error::InvalidArgument(format!("ladder needs at least {} rungs", STABILITY_RUNGS + 1)));
    }
    if ladder.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("ladder must be strictly decreasing".into()));
    }
    if gamma.len() != game.num_players() {
        return Err(Error::Dimension(format!("{} gamma values for {} players", gamma.len(), game.num_players())));
    }
    if !noise.is_iid() {
        return Err(Error::UnsupportedNoise("time-dependent noise has no stationary kernel".into()));
    }
    let structure = KernelStructure::new(game, noise, DEFAULT_STATE_CAP)?;
    let mut lambdas = Vec::with_capacity(ladder.len());
    let mut last = None;
    for &eps in ladder {
        let rates: Vec<f64> = gamma.iter().map(|g| g * eps).collect();
        let report = stochastic_potential(&structure.matrix(&rates)?)?;
        lambdas.push(report.lambda.clone());
        last = Some(report);
    }
    let final_report = last.expect("nonempty ladder");
    let tail = &lambdas[lambdas.len() - STABILITY_RUNGS..];
    let lambda_star = tail.iter().all(|l| *l == tail[0]).then(|| tail[0].clone());
    let (resistance, resistance_agrees) = if noise.is_zero() {
        let r = resistance_potential(game, DEFAULT_STATE_CAP)?;
        let agrees = lambda_star.as_ref().map(|ls| ls.iter().all(|z| r.minimizers.binary_search(z).is_ok()));
        (Some(r), agrees)
    } else {
        (None, None)
    };
    Ok(StabilityReport {
        ladder: ladder.to_vec(),
        gamma: gamma.to_vec(),
        lambdas,
        final_report,
        lambda_star,
        resistance,
        resistance_agrees,
    })
}
