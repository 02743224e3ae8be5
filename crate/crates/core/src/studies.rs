//! The two worked scenarios: a demand-allocation market with many
//! customers and a two-player platform-rotation defense game.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, UtilityFn};
use crate::learning::{simulate, simulate_runs, EmpiricalDistribution, Trajectory};
use crate::noise::NoiseModel;
use crate::schedule::{Deviation, Schedule};

/// Price charged for an aggregate slot demand.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriceFn {
    #[default]
    Identity,
}

impl PriceFn {
    pub fn price(&self, aggregate: f64) -> f64 {
        match self {
            PriceFn::Identity => aggregate,
        }
    }
}

/// Customers pick one of `slots` time slots; slot k (1-based) costs
/// customer i `rho_i * xi_i^k` plus the price of the slot's total demand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemandMarketSpec {
    pub slots: usize,
    pub demands: Vec<f64>,
    pub rho: Vec<f64>,
    pub xi: Vec<f64>,
    #[serde(default)]
    pub price: PriceFn,
}

impl DemandMarketSpec {
    /// Unit demands with `rho = 1` and `xi = 1.1` for everyone.
    pub fn uniform(customers: usize, slots: usize) -> Self {
        DemandMarketSpec {
            slots,
            demands: vec![1.0; customers],
            rho: vec![1.0; customers],
            xi: vec![1.1; customers],
            price: PriceFn::Identity,
        }
    }

    pub fn customers(&self) -> usize {
        self.demands.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.customers();
        if n == 0 || self.slots == 0 {
            return Err(Error::InvalidGame("need at least one customer and one slot".into()));
        }
        if self.rho.len() != n || self.xi.len() != n {
            return Err(Error::InvalidGame("demands, rho and xi must have one entry per customer".into()));
        }
        for i in 0..n {
            if !(self.demands[i] >= 0.0 && self.demands[i].is_finite()) {
                return Err(Error::InvalidGame(format!("customer {i}: demand must be finite and >= 0")));
            }
            if !(self.rho[i] > 0.0 && self.rho[i].is_finite()) {
                return Err(Error::InvalidGame(format!("customer {i}: rho must be positive")));
            }
            if !(self.xi[i] > 1.0 && self.xi[i].is_finite()) {
                return Err(Error::InvalidGame(format!("customer {i}: xi must exceed 1")));
            }
        }
        Ok(())
    }

    pub fn cost(&self, customer: usize, slot: usize) -> f64 {
        self.rho[customer] * self.xi[customer].powi(slot as i32 + 1)
    }

    /// Aggregate demand per slot for a profile of slot indices.
    pub fn aggregate(&self, profile: &[usize], out: &mut [f64]) {
        out.fill(0.0);
        for (i, &a) in profile.iter().enumerate() {
            out[a] += self.demands[i];
        }
    }

    /// Exact potential when all demands are equal to x:
    /// `-sum_i c_i(a_i) - x * sum_k n_k (n_k + 1) / 2` with n_k the slot counts.
    pub fn potential(&self, profile: &[usize]) -> Option<f64> {
        let x = *self.demands.first()?;
        if self.demands.iter().any(|&d| d != x) || self.price != PriceFn::Identity {
            return None;
        }
        let mut counts = vec![0f64; self.slots];
        for &a in profile {
            counts[a] += 1.0;
        }
        let costs: f64 = profile.iter().enumerate().map(|(i, &a)| self.cost(i, a)).sum();
        Some(-costs - x * counts.iter().map(|n| n * (n + 1.0) / 2.0).sum::<f64>())
    }
}

#[derive(Debug)]
struct DemandUtility {
    spec: DemandMarketSpec,
    /// `customers x slots` private costs.
    costs: Vec<f64>,
}

impl UtilityFn for DemandUtility {
    fn eval(&self, profile: &[usize], out: &mut [f64]) {
        let mut totals = vec![0.0; self.spec.slots];
        self.spec.aggregate(profile, &mut totals);
        let k = self.spec.slots;
        for (i, &a) in profile.iter().enumerate() {
            out[i] = -self.costs[i * k + a] - self.spec.price.price(totals[a]);
        }
    }
}

pub fn demand_game(spec: &DemandMarketSpec) -> Result<Game> {
    spec.validate()?;
    let n = spec.customers();
    let k = spec.slots;
    let costs = (0..n).flat_map(|i| (0..k).map(move |a| (i, a))).map(|(i, a)| spec.cost(i, a)).collect();
    let players = (1..=n).map(|i| format!("customer{i}")).collect();
    let actions = vec![(1..=k).map(|s| format!("slot{s}")).collect::<Vec<_>>(); n];
    Game::from_fn(players, actions, Arc::new(DemandUtility { spec: spec.clone(), costs }))
}

/// Per-iteration slot totals along a trajectory of the demand game.
pub fn aggregate_demand_trace(trajectory: &Trajectory, spec: &DemandMarketSpec) -> Result<Vec<Vec<f64>>> {
    if trajectory.num_players != spec.customers() {
        return Err(Error::Dimension(format!(
            "trajectory has {} players, market has {} customers",
            trajectory.num_players,
            spec.customers()
        )));
    }
    (0..=trajectory.horizon)
        .map(|t| {
            let p = trajectory.profile(t);
            if let Some(&a) = p.iter().find(|&&a| a >= spec.slots) {
                return Err(Error::Dimension(format!("slot {a} out of range at t = {t}")));
            }
            let mut totals = vec![0.0; spec.slots];
            spec.aggregate(p, &mut totals);
            Ok(totals)
        })
        .collect()
}

/// Sum over slots of the sample variance of the slot total across
/// iterations `from..=to`. Zero means every slot total stayed constant.
pub fn windowed_variance(trace: &[Vec<f64>], from: usize, to: usize) -> Result<f64> {
    if from >= to || to >= trace.len() {
        return Err(Error::InvalidArgument(format!("window {from}..={to} invalid for a trace of length {}", trace.len())));
    }
    let window = &trace[from..=to];
    let m = window.len() as f64;
    let slots = window[0].len();
    Ok((0..slots)
        .map(|k| {
            let mean = window.iter().map(|r| r[k]).sum::<f64>() / m;
            window.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / (m - 1.0)
        })
        .sum())
}

/// Exploration used for the market: rates `0.1 t^(-p/N)` plus `0.9/t^2`,
/// or a constant 0.1 plus the same deviation when `fixed`.
pub fn demand_schedule(customers: usize, p: f64, fixed: bool) -> Result<Schedule> {
    let base = if fixed {
        Schedule::fixed(vec![1.0; customers], 0.1)?
    } else {
        Schedule::pseries(vec![0.1; customers], p)?
    };
    Ok(base.with_deviation(Deviation::InverseSquare { scale: 0.9 }))
}

/// One market run; returns the trajectory and its slot totals.
pub fn run_demand(
    spec: &DemandMarketSpec,
    schedule: &Schedule,
    noise: &NoiseModel,
    horizon: u64,
    seed: u64,
) -> Result<(Trajectory, Vec<Vec<f64>>)> {
    let game = demand_game(spec)?;
    let tr = simulate(&game, schedule, noise, horizon, seed)?;
    let trace = aggregate_demand_trace(&tr, spec)?;
    Ok((tr, trace))
}

pub const DEFENDER_PLATFORMS: [&str; 5] = ["Fedora 11", "Gentoo 9", "CentOS 6.3", "Debian 6", "FreeBSD 9"];

/// `(defender, attacker)` utilities. Rows are platforms d1..d5, columns are
/// attack mixes (k, 10 - k) for k = 0..=10.
#[rustfmt::skip]
const CYBER_TABLE: [[(f64, f64); 11]; 5] = [
    [(0.0, 1.0), (0.1, 0.9), (0.2, 0.8), (0.3, 0.7), (0.4, 0.6), (0.5, 0.5), (0.6, 0.4), (0.7, 0.3), (0.8, 0.2), (0.9, 0.1), (1.0, 0.0)],
    [(1.0, 0.0), (0.9, 0.1), (0.8, 0.2), (0.7, 0.3), (0.6, 0.4), (0.5, 0.5), (0.4, 0.6), (0.3, 0.7), (0.2, 0.8), (0.1, 0.9), (0.0, 1.0)],
    [(0.0, 1.0), (0.1, 0.9), (0.2, 0.8), (0.3, 0.7), (0.4, 0.6), (0.5, 0.5), (0.6, 0.4), (0.7, 0.3), (0.8, 0.2), (0.9, 0.1), (1.0, 0.0)],
    [(1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0)],
    [(1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0)],
];

/// Defender (5 platforms) against attacker (11 attack mixes); each entry is
/// the share of the period each side controls the server.
pub fn cyber_game() -> Game {
    let defender = (1..=5).map(|d| format!("d{d}")).collect();
    let attacker = (0..=10).map(|k| format!("({k},{})", 10 - k)).collect();
    let mut ud = Vec::with_capacity(55);
    let mut ua = Vec::with_capacity(55);
    for row in &CYBER_TABLE {
        for &(d, a) in row {
            ud.push(d);
            ua.push(a);
        }
    }
    Game::from_tables(vec!["defender".into(), "attacker".into()], vec![defender, attacker], vec![ud, ua])
        .expect("embedded table is well formed")
}

/// `1/(11 sqrt t)` for both players plus `1/(110 t^2)`.
pub fn cyber_schedule() -> Schedule {
    Schedule::pseries(vec![1.0 / 11.0; 2], 1.0)
        .expect("valid constants")
        .with_deviation(Deviation::InverseSquare { scale: 1.0 / 110.0 })
}

/// Replicated cyber runs and the cross-run defense-action frequencies.
pub fn run_cyber(
    schedule: &Schedule,
    noise: &NoiseModel,
    horizon: u64,
    runs: usize,
    base_seed: u64,
) -> Result<(Vec<Trajectory>, EmpiricalDistribution)> {
    let game = cyber_game();
    let trajectories = simulate_runs(&game, schedule, noise, horizon, runs, base_seed)?;
    let emp = EmpiricalDistribution::from_trajectories(&game, &trajectories)?;
    Ok((trajectories, emp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{pure_nash, EquilibriumKind};
    use crate::game::{Profile, DEFAULT_STATE_CAP};

    #[test]
    fn table_checksum() {
        let g = cyber_game();
        for d in 0..5 {
            for k in 0..=10 {
                let ud = g.utility(0, &[d, k]);
                let ua = g.utility(1, &[d, k]);
                let want = match d {
                    0 | 2 => k as f64 / 10.0,
                    1 => (10 - k) as f64 / 10.0,
                    _ => 1.0,
                };
                assert_eq!(ud, want, "d{} k{k}", d + 1);
                assert_eq!(ud + ua, 1.0);
            }
        }
        assert_eq!(g.utility(0, &[0, 0]), 0.0);
        assert_eq!(g.utility(1, &[0, 0]), 1.0);
        assert_eq!(g.utility(0, &[1, 0]), 1.0);
    }

    #[test]
    fn cyber_equilibria() {
        let rep = pure_nash(&cyber_game(), DEFAULT_STATE_CAP).unwrap();
        assert_eq!(rep.kind, EquilibriumKind::PureNash);
        assert_eq!(rep.profiles.len(), 22);
        assert!(rep.profiles.iter().all(|p| p.0[0] >= 3));
    }

    #[test]
    fn single_customer() {
        let spec = DemandMarketSpec { slots: 2, demands: vec![1.0], rho: vec![1.0], xi: vec![2.0], price: PriceFn::Identity };
        let g = demand_game(&spec).unwrap();
        assert_eq!(g.utility(0, &[0]), -3.0);
        assert_eq!(g.utility(0, &[1]), -5.0);
        assert_eq!(pure_nash(&g, DEFAULT_STATE_CAP).unwrap().profiles, vec![Profile(vec![0])]);
    }

    #[test]
    fn cheap_slots_anti_coordinate() {
        let spec = DemandMarketSpec { slots: 2, demands: vec![1.0; 2], rho: vec![1e-6; 2], xi: vec![2.0; 2], price: PriceFn::Identity };
        let g = demand_game(&spec).unwrap();
        let ne = pure_nash(&g, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(ne.profiles, vec![Profile(vec![0, 1]), Profile(vec![1, 0])]);
    }

    #[test]
    fn potential_property() {
        let spec = DemandMarketSpec {
            slots: 3,
            demands: vec![2.0; 3],
            rho: vec![1.0, 0.5, 2.0],
            xi: vec![1.1, 1.5, 1.2],
            price: PriceFn::Identity,
        };
        let g = demand_game(&spec).unwrap();
        for p in g.profiles() {
            for i in 0..3 {
                for b in 0..3 {
                    let mut q = p.0.clone();
                    q[i] = b;
                    let du = g.utility(i, &p.0) - g.utility(i, &q);
                    let dphi = spec.potential(&p.0).unwrap() - spec.potential(&q).unwrap();
                    assert!((du - dphi).abs() < 1e-12);
                }
            }
        }
        let mut uneven = spec.clone();
        uneven.demands[0] = 1.0;
        assert_eq!(uneven.potential(&[0, 0, 0]), None);
    }

    #[test]
    fn costs_never_decrease() {
        let spec = DemandMarketSpec::uniform(4, 10);
        for i in 0..4 {
            for a in 1..10 {
                assert!(spec.cost(i, a - 1) <= spec.cost(i, a));
            }
        }
    }

    #[test]
    fn aggregates_partition_total_demand() {
        let spec = DemandMarketSpec::uniform(100, 10);
        let sched = demand_schedule(100, 1.0, false).unwrap();
        let (tr, trace) = run_demand(&spec, &sched, &NoiseModel::zero(), 50, 3).unwrap();
        assert_eq!(trace.len(), 51);
        for row in &trace {
            assert!((row.iter().sum::<f64>() - 100.0).abs() < 1e-9);
        }
        let mut all_first = tr.clone();
        all_first.profiles.iter_mut().for_each(|a| *a = 0);
        let t = aggregate_demand_trace(&all_first, &spec).unwrap();
        assert_eq!(t[0][0], 100.0);
        assert!(t[0][1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn validation() {
        let mut s = DemandMarketSpec::uniform(2, 3);
        s.xi[1] = 1.0;
        assert!(demand_game(&s).is_err());
        let mut s = DemandMarketSpec::uniform(2, 3);
        s.rho.pop();
        assert!(demand_game(&s).is_err());
    }

    #[test]
    fn windowed_variance_basics() {
        let flat = vec![vec![1.0, 2.0]; 10];
        assert_eq!(windowed_variance(&flat, 0, 9).unwrap(), 0.0);
        let alt: Vec<Vec<f64>> = (0..10).map(|t| vec![(t % 2) as f64]).collect();
        let v = windowed_variance(&alt, 0, 9).unwrap();
        assert!((v - 0.25 * 10.0 / 9.0).abs() < 1e-12);
        assert!(windowed_variance(&flat, 5, 5).is_err());
    }
}
