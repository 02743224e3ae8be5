//! CSV schemas. Every writer emits a header row; every table has a matching
//! row type so outputs can be read back.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundTerms;
use crate::chain::{ChainState, PotentialReport, TransitionMatrix};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::learning::{EmpiricalDistribution, Trajectory};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: u64,
    pub player: usize,
    pub action: usize,
    pub received_utility: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRow {
    pub t: u64,
    pub player: usize,
    pub action: usize,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelRow {
    pub z_from: usize,
    pub z_to: usize,
    pub prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRow {
    pub state_index: usize,
    pub prev_profile: String,
    pub curr_profile: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialRow {
    pub state_index: usize,
    pub prev_profile: String,
    pub curr_profile: String,
    pub log_potential: f64,
    pub in_lambda: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub t: u64,
    pub log10_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceRow {
    pub t: u64,
    pub distance: f64,
}

/// Writes rows of one type; the header comes from the field names.
pub fn write_rows<W: Write, T: Serialize>(out: W, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read, T: DeserializeOwned>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

pub fn write_trajectory<W: Write>(out: W, tr: &Trajectory) -> Result<()> {
    let n = tr.num_players;
    write_rows(
        out,
        (0..=tr.horizon).flat_map(|t| {
            (0..n).map(move |i| TrajectoryRow {
                t,
                player: i,
                action: tr.action(t, i),
                received_utility: tr.received_utility(t, i),
            })
        }),
    )
}

pub fn write_empirical<W: Write>(out: W, emp: &EmpiricalDistribution) -> Result<()> {
    write_rows(
        out,
        (0..=emp.horizon).flat_map(|t| {
            emp.action_counts.iter().enumerate().flat_map(move |(i, &k)| {
                (0..k).map(move |a| EmpiricalRow { t, player: i, action: a, frequency: emp.action_frequency(t, i, a) })
            })
        }),
    )
}

/// Nonzero entries only, row by row.
pub fn write_kernel<W: Write>(out: W, p: &TransitionMatrix) -> Result<()> {
    write_rows(
        out,
        (0..p.size()).flat_map(|z| {
            p.successors(z)
                .filter(|&(_, q)| q > 0.0)
                .map(move |(to, prob)| KernelRow { z_from: z, z_to: to, prob })
        }),
    )
}

fn state_profiles(game: &Game, z: usize) -> (String, String) {
    let s = ChainState::from_index(game, z);
    (s.prev.to_string(), s.curr.to_string())
}

/// Legend mapping chain-state indices to `(previous, current)` profiles.
pub fn write_state_legend<W: Write>(out: W, game: &Game, states: usize) -> Result<()> {
    write_rows(
        out,
        (0..states).map(|z| {
            let (prev_profile, curr_profile) = state_profiles(game, z);
            StateRow { state_index: z, prev_profile, curr_profile }
        }),
    )
}

/// `in_lambda` marks membership of `lambda` (ascending).
pub fn write_potential<W: Write>(out: W, game: &Game, report: &PotentialReport, lambda: &[usize]) -> Result<()> {
    write_rows(
        out,
        report.log_potential.iter().enumerate().map(|(z, &lp)| {
            let (prev_profile, curr_profile) = state_profiles(game, z);
            PotentialRow {
                state_index: z,
                prev_profile,
                curr_profile,
                log_potential: lp,
                in_lambda: lambda.binary_search(&z).is_ok(),
            }
        }),
    )
}

pub fn write_bounds<W: Write>(out: W, terms: &[BoundTerms]) -> Result<()> {
    write_rows(out, terms.iter().map(|b| BoundRow { t: b.t, log10_bound: b.total.log10_abs() }))
}

/// `t0` is the iteration of `trace[0]`.
pub fn write_distance<W: Write>(out: W, t0: u64, trace: &[f64]) -> Result<()> {
    write_rows(out, trace.iter().enumerate().map(|(k, &d)| DistanceRow { t: t0 + k as u64, distance: d }))
}

/// Wide table: `t` followed by one column per named series.
pub fn write_wide<W: Write>(out: W, columns: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend(columns.iter().cloned());
    w.write_record(&header)?;
    for (t, r) in rows.iter().enumerate() {
        if r.len() != columns.len() {
            return Err(Error::Dimension(format!("row {t} has {} values for {} columns", r.len(), columns.len())));
        }
        let mut rec = vec![t.to_string()];
        rec.extend(r.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
