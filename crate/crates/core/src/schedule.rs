//! Exploration schedules.
//!
//! Player i explores at iteration t with probability
//! `rate_i(t) = gamma_i * common(t) + deviation_i(t)`. The common part is
//! shared by every player, `gamma_i` scales it per player and the deviation
//! is a player-specific correction that is expected to die out faster than
//! the common part.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CommonRate {
    /// `t^(-exponent)`.
    Power { exponent: f64 },
    /// Constant in t.
    Fixed { value: f64 },
    /// `values[t - 1]`; iterations past the end are an error.
    Table { values: Vec<f64> },
}

impl CommonRate {
    fn at(&self, t: u64) -> Result<f64> {
        match self {
            CommonRate::Power { exponent } => Ok((t as f64).powf(-exponent)),
            CommonRate::Fixed { value } => Ok(*value),
            CommonRate::Table { values } => values.get(t as usize - 1).copied().ok_or_else(|| {
                Error::InvalidSchedule(format!("common-rate table has {} entries, t={t} requested", values.len()))
            }),
        }
    }

    fn is_diminishing(&self) -> bool {
        match self {
            CommonRate::Power { exponent } => *exponent > 0.0,
            CommonRate::Fixed { .. } => false,
            CommonRate::Table { values } => values.windows(2).all(|w| w[1] < w[0]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Deviation {
    Zero,
    /// `scale / t^2`.
    InverseSquare { scale: f64 },
    Constant { value: f64 },
    /// `values[t - 1]`.
    Table { values: Vec<f64> },
}

impl Deviation {
    fn at(&self, t: u64) -> Result<f64> {
        match self {
            Deviation::Zero => Ok(0.0),
            Deviation::InverseSquare { scale } => Ok(scale / (t as f64 * t as f64)),
            Deviation::Constant { value } => Ok(*value),
            Deviation::Table { values } => values.get(t as usize - 1).copied().ok_or_else(|| {
                Error::InvalidSchedule(format!("deviation table has {} entries, t={t} requested", values.len()))
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMode {
    Diminishing,
    /// Constant base rate; does not satisfy the strict-decrease assumption.
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    gamma: Vec<f64>,
    common: CommonRate,
    deviation: Vec<Deviation>,
    pseries_p: Option<f64>,
}

impl Schedule {
    pub fn new(gamma: Vec<f64>, common: CommonRate, deviation: Vec<Deviation>) -> Result<Self> {
        if gamma.is_empty() {
            return Err(Error::InvalidSchedule("no players".into()));
        }
        if let Some(g) = gamma.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidSchedule(format!("gamma must be positive, got {g}")));
        }
        if deviation.len() != gamma.len() {
            return Err(Error::InvalidSchedule(format!(
                "{} deviations for {} players",
                deviation.len(),
                gamma.len()
            )));
        }
        Ok(Schedule { gamma, common, deviation, pseries_p: None })
    }

    /// `gamma_i * t^(-p/N)` with no deviation, N = `gamma.len()`.
    pub fn pseries(gamma: Vec<f64>, p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidSchedule(format!("p must lie in (0, 1], got {p}")));
        }
        let n = gamma.len();
        let mut s = Schedule::new(
            gamma,
            CommonRate::Power { exponent: p / n.max(1) as f64 },
            vec![Deviation::Zero; n],
        )?;
        s.pseries_p = Some(p);
        Ok(s)
    }

    /// The p-series with `gamma_i = 1/|A_i|`, i.e. `1 / (|A_i| t^(p/N))`.
    pub fn canonical(action_counts: &[usize], p: f64) -> Result<Self> {
        Schedule::pseries(action_counts.iter().map(|&k| 1.0 / k as f64).collect(), p)
    }

    pub fn fixed(gamma: Vec<f64>, value: f64) -> Result<Self> {
        let n = gamma.len();
        Schedule::new(gamma, CommonRate::Fixed { value }, vec![Deviation::Zero; n])
    }

    /// Same deviation for every player.
    pub fn with_deviation(mut self, deviation: Deviation) -> Self {
        self.deviation = vec![deviation; self.gamma.len()];
        self
    }

    pub fn with_deviations(mut self, deviation: Vec<Deviation>) -> Result<Self> {
        if deviation.len() != self.gamma.len() {
            return Err(Error::InvalidSchedule("one deviation per player required".into()));
        }
        self.deviation = deviation;
        Ok(self)
    }

    pub fn num_players(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn common(&self) -> &CommonRate {
        &self.common
    }

    pub fn deviations(&self) -> &[Deviation] {
        &self.deviation
    }

    pub fn pseries_p(&self) -> Option<f64> {
        self.pseries_p
    }

    pub fn has_deviation(&self) -> bool {
        self.deviation.iter().any(|d| *d != Deviation::Zero)
    }

    pub fn mode(&self) -> RateMode {
        if self.common.is_diminishing() {
            RateMode::Diminishing
        } else {
            RateMode::Fixed
        }
    }

    fn check_t(t: u64) -> Result<()> {
        if t == 0 {
            return Err(Error::Precondition("schedules are indexed from t = 1".into()));
        }
        Ok(())
    }

    pub fn common_rate(&self, t: u64) -> Result<f64> {
        Self::check_t(t)?;
        self.common.at(t)
    }

    /// `gamma_i * common(t)`, without the deviation.
    pub fn base_rate(&self, player: usize, t: u64) -> Result<f64> {
        Ok(self.gamma[player] * self.common_rate(t)?)
    }

    pub fn deviation(&self, player: usize, t: u64) -> Result<f64> {
        Self::check_t(t)?;
        self.deviation[player].at(t)
    }

    /// Probability that `player` explores at iteration t.
    pub fn effective_rate(&self, player: usize, t: u64) -> Result<f64> {
        let rate = self.base_rate(player, t)? + self.deviation(player, t)?;
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::ScheduleViolation { player, t, rate });
        }
        Ok(rate)
    }

    pub fn effective_rates(&self, t: u64) -> Result<Vec<f64>> {
        (0..self.num_players()).map(|i| self.effective_rate(i, t)).collect()
    }

    /// Rates at a given common value with the deviation switched off; used
    /// for the stationary analysis of the homogeneous chain.
    pub fn rates_at_common(&self, common: f64) -> Result<Vec<f64>> {
        self.gamma
            .iter()
            .enumerate()
            .map(|(player, g)| {
                let rate = g * common;
                if rate > 0.0 && rate <= 1.0 {
                    Ok(rate)
                } else {
                    Err(Error::ScheduleViolation { player, t: 0, rate })
                }
            })
            .collect()
    }

    pub fn base_inf_norm(&self, t: u64) -> Result<f64> {
        let c = self.common_rate(t)?;
        Ok(self.gamma.iter().fold(0.0, |m, g| f64::max(m, g * c)))
    }

    pub fn deviation_inf_norm(&self, t: u64) -> Result<f64> {
        let mut m: f64 = 0.0;
        for i in 0..self.num_players() {
            m = m.max(self.deviation(i, t)?.abs());
        }
        Ok(m)
    }

    /// `||e(t)||_inf^N / prod_i rate_i(t)`.
    pub fn e_ratio(&self, t: u64) -> Result<f64> {
        let e = self.deviation_inf_norm(t)?;
        if e == 0.0 {
            return Ok(0.0);
        }
        let n = self.num_players() as f64;
        let mut log_den = 0.0;
        for i in 0..self.num_players() {
            log_den += self.effective_rate(i, t)?.ln();
        }
        Ok((n * e.ln() - log_den).exp())
    }

    /// Natural log of `prod_i base_rate_i(t)`.
    pub fn log_base_product(&self, t: u64) -> Result<f64> {
        let lc = self.common_rate(t)?.ln();
        Ok(self.gamma.iter().map(|g| g.ln() + lc).sum())
    }

    pub fn log_effective_product(&self, t: u64) -> Result<f64> {
        let mut s = 0.0;
        for i in 0..self.num_players() {
            s += self.effective_rate(i, t)?.ln();
        }
        Ok(s)
    }

    pub fn describe(&self) -> String {
        let common = match &self.common {
            CommonRate::Power { exponent } => format!("t^-{exponent}"),
            CommonRate::Fixed { value } => format!("fixed {value}"),
            CommonRate::Table { values } => format!("table[{}]", values.len()),
        };
        let dev = match self.deviation.first() {
            Some(Deviation::Zero) | None => "0".to_string(),
            Some(Deviation::InverseSquare { scale }) => format!("{scale}/t^2"),
            Some(Deviation::Constant { value }) => format!("{value}"),
            Some(Deviation::Table { values }) => format!("table[{}]", values.len()),
        };
        format!("gamma={:?} common={common} deviation={dev}", self.gamma)
    }

    /// Finite-horizon diagnostics for the schedule assumptions over t = 1..=horizon.
    pub fn validate(&self, horizon: u64) -> Result<ScheduleReport> {
        validate_schedule(self, horizon)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Warn,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub status: CheckStatus,
    /// The condition is asymptotic; a finite horizon can only suggest it.
    pub heuristic: bool,
    pub detail: String,
}

impl Check {
    fn new(status: CheckStatus, heuristic: bool, detail: impl Into<String>) -> Self {
        Check { status, heuristic, detail: detail.into() }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub horizon: u64,
    pub mode: RateMode,
    pub rates_in_range: Check,
    pub strictly_decreasing: Check,
    pub base_not_summable: Check,
    pub effective_not_summable: Check,
    pub deviation_ratio_vanishes: Check,
    /// ln of sum_{t<=T} prod_i base_rate_i(t).
    pub log_partial_sum_base: f64,
    /// ln of sum_{t<=T} prod_i rate_i(t).
    pub log_partial_sum_effective: f64,
}

impl ScheduleReport {
    pub fn all_passed(&self) -> bool {
        [
            &self.rates_in_range,
            &self.strictly_decreasing,
            &self.base_not_summable,
            &self.effective_not_summable,
            &self.deviation_ratio_vanishes,
        ]
        .iter()
        .all(|c| c.passed())
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

// Terms decaying like t^-q with q <= 1 give a divergent series; the local
// exponent is read off the second half of the horizon.
fn summability_check(log_terms: &[f64]) -> Check {
    let last = log_terms.len();
    let mid = last.div_ceil(2);
    let q = -(log_terms[last - 1] - log_terms[mid - 1]) / ((last as f64) / (mid as f64)).ln();
    if q <= 1.0 + 1e-3 {
        Check::new(CheckStatus::Pass, true, format!("terms decay like t^-{q:.4}; partial sums grow at least logarithmically"))
    } else {
        Check::new(CheckStatus::Warn, true, format!("terms decay like t^-{q:.4}; series likely summable"))
    }
}

pub fn validate_schedule(schedule: &Schedule, horizon: u64) -> Result<ScheduleReport> {
    if horizon < 2 {
        return Err(Error::Precondition("validation horizon must be at least 2".into()));
    }
    let n = schedule.num_players();
    let mut violation = None;
    let mut decreasing = true;
    let mut log_base = Vec::with_capacity(horizon as usize);
    let mut log_eff = Vec::with_capacity(horizon as usize);
    let mut ratios = Vec::with_capacity(horizon as usize);
    let mut prev_base = vec![f64::INFINITY; n];
    for t in 1..=horizon {
        for (i, prev) in prev_base.iter_mut().enumerate() {
            let b = schedule.base_rate(i, t)?;
            if !(b < *prev) {
                decreasing = false;
            }
            *prev = b;
            if violation.is_none() {
                if let Err(e) = schedule.effective_rate(i, t) {
                    violation = Some(e);
                }
            }
        }
        log_base.push(schedule.log_base_product(t)?);
        if violation.is_none() {
            log_eff.push(schedule.log_effective_product(t)?);
            ratios.push(schedule.e_ratio(t)?);
        }
    }

    let rates_in_range = match &violation {
        None => Check::new(CheckStatus::Pass, false, "all effective rates in (0, 1]"),
        Some(e) => Check::new(CheckStatus::Fail, false, e.to_string()),
    };
    let mode = schedule.mode();
    let strictly_decreasing = if decreasing {
        Check::new(CheckStatus::Pass, false, "base rates strictly decreasing")
    } else if mode == RateMode::Fixed {
        Check::new(CheckStatus::Fail, false, "fixed-rate mode: base rates are not strictly decreasing")
    } else {
        Check::new(CheckStatus::Fail, false, "base rates are not strictly decreasing")
    };
    let base_not_summable = summability_check(&log_base);
    let log_partial_sum_base = log_base.iter().fold(f64::NEG_INFINITY, |a, &b| log_add(a, b));

    let (effective_not_summable, deviation_ratio_vanishes, log_partial_sum_effective) = if violation.is_some() {
        let skip = || Check::new(CheckStatus::Fail, false, "not evaluated: effective rate out of range");
        (skip(), skip(), f64::NAN)
    } else {
        let last = ratios.len();
        let mid = last.div_ceil(2);
        let (r_mid, r_end) = (ratios[mid - 1], ratios[last - 1]);
        let ratio_check = if r_end == 0.0 {
            Check::new(CheckStatus::Pass, true, "deviation ratio is zero at the horizon")
        } else if r_mid == 0.0 {
            Check::new(CheckStatus::Fail, true, "deviation ratio became nonzero late in the horizon")
        } else {
            let slope = (r_end / r_mid).ln() / ((last as f64) / (mid as f64)).ln();
            if slope < -0.05 {
                Check::new(CheckStatus::Pass, true, format!("deviation ratio decays like t^{slope:.3}"))
            } else {
                Check::new(CheckStatus::Fail, true, format!("deviation ratio does not decay (local slope {slope:.3}, value {r_end:.3e})"))
            }
        };
        (
            summability_check(&log_eff),
            ratio_check,
            log_eff.iter().fold(f64::NEG_INFINITY, |a, &b| log_add(a, b)),
        )
    };

    Ok(ScheduleReport {
        horizon,
        mode,
        rates_in_range,
        strictly_decreasing,
        base_not_summable,
        effective_not_summable,
        deviation_ratio_vanishes,
        log_partial_sum_base,
        log_partial_sum_effective,
    })
}
