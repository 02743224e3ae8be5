//! Convergence-rate bounds for the learning chain, evaluated in log domain.
//!
//! The constants involved grow like `|Z|^|Z|`, so everything that can
//! overflow is a [`LogReal`]. The bounds are valid but, at every practical
//! size, vacuous: `C` dwarfs the trivial bound `D(t) <= 2`.

mod logreal;

pub use logreal::LogReal;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schedule::Schedule;

/// What the distance bound needs besides t.
#[derive(Clone, Debug)]
pub struct BoundInputs {
    pub action_counts: Vec<usize>,
    pub schedule: Schedule,
    /// The multiplicative constant.
    pub c: LogReal,
    /// Pivot iteration t*; the existential threshold it stands for is not
    /// computable, so the caller picks it.
    pub t_star: u64,
    pub horizon: u64,
}

impl BoundInputs {
    pub fn new(action_counts: Vec<usize>, schedule: Schedule, c: LogReal, t_star: u64, horizon: u64) -> Result<Self> {
        if action_counts.is_empty() || action_counts.contains(&0) {
            return Err(Error::InvalidArgument("every player needs at least one action".into()));
        }
        if schedule.num_players() != action_counts.len() {
            return Err(Error::Dimension(format!(
                "schedule has {} players, action counts {}",
                schedule.num_players(),
                action_counts.len()
            )));
        }
        if t_star == 0 {
            return Err(Error::Precondition("t* must be at least 1".into()));
        }
        if horizon < t_star + 1 {
            return Err(Error::Precondition(format!("horizon {horizon} must be at least t* + 1 = {}", t_star + 1)));
        }
        if c.sign() <= 0 {
            return Err(Error::InvalidArgument("C must be positive".into()));
        }
        Ok(BoundInputs { action_counts, schedule, c, t_star, horizon })
    }

    pub fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    /// `ln |Z| = 2 * sum ln |A_i|`.
    pub fn ln_chain_size(&self) -> f64 {
        2.0 * self.action_counts.iter().map(|&a| (a as f64).ln()).sum::<f64>()
    }
}

/// The bound at one iteration, with its pieces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundTerms {
    pub t: u64,
    /// `||eps(t*)||_inf`
    pub pivot_rate: f64,
    /// `||eps(t)||_inf`
    pub rate: f64,
    /// `e_r(t*)`
    pub deviation_ratio: f64,
    /// `exp(-sum_{t*<=tau<t} prod_i eps_i(tau)|A_i|)`
    pub exp_base: LogReal,
    /// Same with the effective rates.
    pub exp_effective: LogReal,
    /// C times the sum of the five terms.
    pub total: LogReal,
}

impl BoundTerms {
    /// C times the terms that still change with t.
    pub fn t_dependent(&self, c: LogReal) -> LogReal {
        c * (LogReal::from_f64(self.rate) + self.exp_base + self.exp_effective)
    }

    /// C times the terms fixed by t*.
    pub fn pivot_part(&self, c: LogReal) -> LogReal {
        c * LogReal::from_f64(self.pivot_rate + self.deviation_ratio)
    }
}

/// The bound at every t of an ascending grid; sums are accumulated once
/// over `t*..max(grid)`.
pub fn theorem1_trace(inputs: &BoundInputs, grid: &[u64]) -> Result<Vec<BoundTerms>> {
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("t grid must be strictly increasing".into()));
    }
    let t_star = inputs.t_star;
    if let Some(&t) = grid.first() {
        if t <= t_star {
            return Err(Error::Precondition(format!("t = {t} must exceed t* = {t_star}")));
        }
    }
    let s = &inputs.schedule;
    let pivot_rate = s.base_inf_norm(t_star)?;
    let deviation_ratio = s.e_ratio(t_star)?;
    let ln_actions: f64 = inputs.action_counts.iter().map(|&a| (a as f64).ln()).sum();
    let deviates = s.has_deviation();
    let mut sum_base = 0.0;
    let mut sum_eff = 0.0;
    let mut tau = t_star;
    let mut out = Vec::with_capacity(grid.len());
    for &t in grid {
        while tau < t {
            let term = (s.log_base_product(tau)? + ln_actions).exp();
            sum_base += term;
            // Without a deviation the two sums are the same series.
            sum_eff += if deviates { (s.log_effective_product(tau)? + ln_actions).exp() } else { term };
            tau += 1;
        }
        let rate = s.base_inf_norm(t)?;
        let exp_base = LogReal::from_ln(-sum_base);
        let exp_effective = LogReal::from_ln(-sum_eff);
        let total = inputs.c * (LogReal::from_f64(pivot_rate + rate + deviation_ratio) + exp_base + exp_effective);
        out.push(BoundTerms { t, pivot_rate, rate, deviation_ratio, exp_base, exp_effective, total });
    }
    Ok(out)
}

pub fn theorem1_bound(inputs: &BoundInputs, t: u64) -> Result<LogReal> {
    Ok(theorem1_trace(inputs, &[t])?[0].total)
}

/// Every t in `t* + 1 ..= horizon`.
pub fn theorem1_full_trace(inputs: &BoundInputs) -> Result<Vec<BoundTerms>> {
    let grid: Vec<u64> = (inputs.t_star + 1..=inputs.horizon).collect();
    theorem1_trace(inputs, &grid)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Corollary2 {
    /// `|Z| = (prod |A_i|)^2`; may be infinite for large games.
    pub chain_size: f64,
    pub c_min: LogReal,
    pub c_max: LogReal,
    pub c_eps: LogReal,
    pub c: LogReal,
    /// Largest admissible `||eps~(t)||_inf`.
    pub rate_cap: LogReal,
}

impl Corollary2 {
    pub fn rate_cap_holds(&self, max_rate: f64) -> bool {
        LogReal::from_f64(max_rate) <= self.rate_cap
    }
}

/// Closed-form constants for the zero-noise, weakly acyclic case.
pub fn corollary2_constants(action_counts: &[usize], gamma: &[f64]) -> Result<Corollary2> {
    if action_counts.is_empty() || action_counts.contains(&0) {
        return Err(Error::InvalidArgument("every player needs at least one action".into()));
    }
    if gamma.len() != action_counts.len() || gamma.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
        return Err(Error::InvalidArgument("need one positive gamma per player".into()));
    }
    let n = action_counts.len() as f64;
    let ln_z = 2.0 * action_counts.iter().map(|&a| (a as f64).ln()).sum::<f64>();
    let z = action_counts.iter().map(|&a| a as f64).product::<f64>().powi(2);
    let a_inf = *action_counts.iter().max().unwrap() as f64;
    let g_min = gamma.iter().cloned().fold(f64::INFINITY, f64::min);
    let g_max = gamma.iter().cloned().fold(0.0, f64::max);
    let nz = n * z;
    let ln2 = std::f64::consts::LN_2;

    let ln_c_min = (nz * (g_min / a_inf).ln()).min(0.0);
    let ln_c_max = (nz * g_max.ln()).max(0.0);
    let ln_shared = n.ln() + z * (n + 1.0).ln() + nz * ln2 + ln_c_max;
    let ln_c_eps = 8f64.ln() + ln_shared + (z + 4.0) * ln_z - ln_c_min;
    let ln_c = ln_z.max(n * 4f64.ln()).max(4f64.ln() + ln_c_eps);
    let ln_cap = ln_c_min - (ln2 + ln_shared + (z + 3.0) * ln_z);
    Ok(Corollary2 {
        chain_size: z,
        c_min: LogReal::from_ln(ln_c_min),
        c_max: LogReal::from_ln(ln_c_max),
        c_eps: LogReal::from_ln(ln_c_eps),
        c: LogReal::from_ln(ln_c),
        rate_cap: LogReal::from_ln(ln_cap),
    })
}

/// Iterations the canonical schedule `1/(|A_i| t^(1/N))` needs to bring the
/// distance below `delta`: `e (4C)^(N+1) / delta^(N+1) - 4Ce/delta`.
pub fn explicit_rate(n: usize, c: LogReal, delta: f64) -> Result<LogReal> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    if n == 0 || c.sign() <= 0 {
        return Err(Error::InvalidArgument("need N >= 1 and C > 0".into()));
    }
    let e = LogReal::from_f64(std::f64::consts::E);
    let x = LogReal::from_f64(4.0) * c / LogReal::from_f64(delta);
    Ok(e * x.powf(n as f64 + 1.0) - e * x)
}

/// `C (2e(t* - 1)/t + 2/t*^(1/N))`.
pub fn two_term_bound(n: usize, c: LogReal, t_star: u64, t: LogReal) -> Result<LogReal> {
    if n == 0 || t_star == 0 || t.sign() <= 0 {
        return Err(Error::InvalidArgument("need N >= 1, t* >= 1 and t > 0".into()));
    }
    let first = LogReal::from_f64(2.0 * std::f64::consts::E * (t_star as f64 - 1.0)) / t;
    let second = LogReal::from_f64(2.0) / LogReal::from_f64(t_star as f64).powf(1.0 / n as f64);
    Ok(c * (first + second))
}

/// The bound under the p-series schedule `1/(|A_i| t^(p/N))`, e = 0.
pub fn pseries_bound(action_counts: &[usize], p: f64, t_star: u64, grid: &[u64], c: LogReal) -> Result<Vec<BoundTerms>> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!("p must lie in (0, 1], got {p}")));
    }
    let schedule = Schedule::canonical(action_counts, p)?;
    let horizon = grid.last().copied().unwrap_or(t_star + 1).max(t_star + 1);
    let inputs = BoundInputs::new(action_counts.to_vec(), schedule, c, t_star, horizon)?;
    theorem1_trace(&inputs, grid)
}
