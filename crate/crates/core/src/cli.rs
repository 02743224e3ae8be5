//! The `gtrl` command line. Exit codes: 0 success, 1 runtime error,
//! 2 bad configuration, 3 exact-analysis cap exceeded. Failures print one
//! JSON object on stderr.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bounds::{corollary2_constants, explicit_rate, pseries_bound, LogReal};
use crate::chain::{evolve_each, stable_states, stationary_linear, Distribution, KernelStructure};
use crate::error::Error;
use crate::game::{Game, DEFAULT_STATE_CAP};
use crate::io::{
    check_rates, write_bounds, write_distance, write_empirical, write_kernel, write_potential, write_rows,
    write_state_legend, write_trajectory, write_wide, DemandConfig, ExperimentConfig, LineChart, OutputDir,
    ScheduleConfig, ScheduleKind, Series,
};
use crate::learning::{simulate_runs, EmpiricalDistribution, Trajectory};
use crate::noise::NoiseModel;
use crate::schedule::{Deviation, Schedule};
use crate::studies::{aggregate_demand_trace, DemandMarketSpec};

#[derive(Debug, Parser)]
#[command(name = "gtrl", version, about = "Payoff-based learning in finite games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags that override config fields.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub horizon: Option<u64>,
    /// p-series exponent; for `bounds`, replaces the list of exponents.
    #[arg(long)]
    pub p: Option<f64>,
    /// zero | uniform:<E> | gaussian:<sigma> | growing:<scale>
    #[arg(long)]
    pub noise: Option<String>,
    /// Switch the schedule to a constant common rate.
    #[arg(long, value_name = "RATE")]
    pub fixed_rate: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the dynamics and write trajectory and empirical tables.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Exact chain analysis: kernel, potentials, stable states, D(t).
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Convergence constants and bound traces.
    Bounds {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Preset experiments.
    Casestudy {
        #[command(subcommand)]
        which: CaseStudy,
    },
}

#[derive(Debug, Subcommand)]
pub enum CaseStudy {
    /// Customers choosing consumption slots.
    Demand {
        #[arg(long, default_value_t = 100)]
        customers: usize,
        #[arg(long, default_value_t = 10)]
        slots: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value = "zero")]
        noise: String,
        /// Constant base rate 0.1 instead of the diminishing one.
        #[arg(long)]
        fixed_rate: bool,
        #[arg(long, default_value_t = 2000)]
        horizon: u64,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Platform rotation against an attacker.
    Cyber {
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 10_000)]
        horizon: u64,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value = "zero")]
        noise: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

/// A failure as reported on stderr.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub code: i32,
    pub error: String,
    pub message: String,
}

impl CliError {
    fn config(e: Error) -> Self {
        CliError { code: 2, error: kind(&e).into(), message: e.to_string() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap_or_else(|_| format!("{{\"code\":{}}}", self.code))
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidGame(_) => "invalid-game",
        Error::InvalidProfile(_) => "invalid-profile",
        Error::Infeasible { .. } => "cap-exceeded",
        Error::ScheduleViolation { .. } => "schedule-violation",
        Error::InvalidSchedule(_) => "invalid-schedule",
        Error::RateOutOfRange(_) => "rate-out-of-range",
        Error::UnsupportedNoise(_) => "unsupported-noise",
        Error::InvalidNoise(_) => "invalid-noise",
        Error::InvalidKernel(_) => "invalid-kernel",
        Error::Singular(_) => "singular",
        Error::Dimension(_) => "dimension",
        Error::Precondition(_) => "precondition",
        Error::InvalidArgument(_) => "invalid-argument",
        Error::Io(_) => "io",
        Error::Parse(_) => "parse",
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Infeasible { .. } => 3,
            Error::InvalidGame(_)
            | Error::InvalidProfile(_)
            | Error::ScheduleViolation { .. }
            | Error::InvalidSchedule(_)
            | Error::RateOutOfRange(_)
            | Error::UnsupportedNoise(_)
            | Error::InvalidNoise(_)
            | Error::Dimension(_)
            | Error::InvalidArgument(_)
            | Error::Parse(_) => 2,
            _ => 1,
        };
        CliError { code, error: kind(&e).into(), message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Errors go to stderr as one JSON line.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.code
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("GTRL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(Error::InvalidArgument(format!("GTRL_THREADS must be a positive integer, got `{v}`"))))?;
    // A pool may already exist when called twice in one process; the first
    // setting stands.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { config, out, overrides } => {
            let (cfg, base) = load(&config, &overrides)?;
            cmd_simulate(&cfg, &base, &out, "simulate")
        }
        Command::Analyze { config, out, overrides } => {
            let (cfg, base) = load(&config, &overrides)?;
            cmd_analyze(&cfg, &base, &out)
        }
        Command::Bounds { config, out, overrides } => {
            let (cfg, base) = load(&config, &overrides)?;
            cmd_bounds(&cfg, &base, &out)
        }
        Command::Casestudy { which } => match which {
            CaseStudy::Demand { customers, slots, p, noise, fixed_rate, horizon, runs, seed, out } => {
                let cfg = demand_config(customers, slots, p, &noise, fixed_rate, horizon, runs, seed);
                cmd_simulate(&cfg, Path::new("."), &out, "casestudy demand")
            }
            CaseStudy::Cyber { runs, horizon, seed, noise, out } => {
                let cfg = cyber_config(runs, horizon, seed, &noise);
                cmd_simulate(&cfg, Path::new("."), &out, "casestudy cyber")
            }
        },
    }
}

fn load(path: &Path, o: &Overrides) -> CliResult<(ExperimentConfig, PathBuf)> {
    let (mut cfg, base) = ExperimentConfig::load(path).map_err(CliError::config)?;
    apply_overrides(&mut cfg, o);
    Ok((cfg, base))
}

/// Flags win over the file.
pub fn apply_overrides(cfg: &mut ExperimentConfig, o: &Overrides) {
    if let Some(s) = o.seed {
        cfg.base_seed = s;
    }
    if let Some(r) = o.runs {
        cfg.runs = r;
    }
    if let Some(h) = o.horizon {
        cfg.horizon = h;
    }
    if let Some(n) = &o.noise {
        cfg.noise = n.clone();
    }
    if let Some(p) = o.p {
        cfg.bounds.p = vec![p];
        if let Some(sc) = cfg.schedule.as_mut() {
            sc.kind = ScheduleKind::Pseries;
            sc.p = Some(p);
        }
    }
    if let Some(v) = o.fixed_rate {
        if let Some(sc) = cfg.schedule.as_mut() {
            sc.kind = ScheduleKind::Fixed;
            sc.value = Some(v);
        }
    }
}

/// The market preset: rates `0.1 t^(-p/N) + 0.9/t^2`, or `0.1 + 0.9/t^2`.
#[allow(clippy::too_many_arguments)]
pub fn demand_config(
    customers: usize,
    slots: usize,
    p: f64,
    noise: &str,
    fixed_rate: bool,
    horizon: u64,
    runs: usize,
    seed: u64,
) -> ExperimentConfig {
    let schedule = ScheduleConfig {
        kind: if fixed_rate { ScheduleKind::Fixed } else { ScheduleKind::Pseries },
        gamma: Some(vec![if fixed_rate { 1.0 } else { 0.1 }]),
        p: (!fixed_rate).then_some(p),
        value: fixed_rate.then_some(0.1),
        table: None,
        deviation: Deviation::InverseSquare { scale: 0.9 },
    };
    ExperimentConfig {
        game: Some("demand".into()),
        horizon,
        runs,
        base_seed: seed,
        noise: noise.into(),
        demand: Some(DemandConfig { customers, slots, rho: 1.0, xi: 1.1 }),
        schedule: Some(schedule),
        analyze: Default::default(),
        bounds: Default::default(),
    }
}

/// The defense preset: `1/(11 sqrt t) + 1/(110 t^2)` for both players.
pub fn cyber_config(runs: usize, horizon: u64, seed: u64, noise: &str) -> ExperimentConfig {
    let schedule = ScheduleConfig {
        kind: ScheduleKind::Pseries,
        gamma: Some(vec![1.0 / 11.0]),
        p: Some(1.0),
        value: None,
        table: None,
        deviation: Deviation::InverseSquare { scale: 1.0 / 110.0 },
    };
    ExperimentConfig {
        game: Some("cyber".into()),
        horizon,
        runs,
        base_seed: seed,
        noise: noise.into(),
        demand: None,
        schedule: Some(schedule),
        analyze: Default::default(),
        bounds: Default::default(),
    }
}

struct Prepared {
    game: Game,
    demand: Option<DemandMarketSpec>,
    schedule: Schedule,
    noise: NoiseModel,
}

/// Everything that can be rejected before any computation.
fn prepare(cfg: &ExperimentConfig, base: &Path) -> CliResult<Prepared> {
    let c = CliError::config;
    if cfg.horizon < 2 {
        return Err(c(Error::InvalidArgument(format!("horizon must be at least 2, got {}", cfg.horizon))));
    }
    if cfg.runs == 0 {
        return Err(c(Error::InvalidArgument("runs must be at least 1".into())));
    }
    let lg = cfg.load_game(base).map_err(c)?;
    let schedule = cfg.schedule_for(&lg.game).map_err(c)?;
    if schedule.num_players() != lg.game.num_players() {
        return Err(c(Error::Dimension(format!(
            "schedule has {} players, game has {}",
            schedule.num_players(),
            lg.game.num_players()
        ))));
    }
    check_rates(&schedule, cfg.horizon).map_err(c)?;
    let noise = cfg.noise_model().map_err(c)?;
    Ok(Prepared { game: lg.game, demand: lg.demand, schedule, noise })
}

fn start(cfg: &ExperimentConfig, out: &Path, command: &str) -> CliResult<OutputDir> {
    let mut dir = OutputDir::create(out, command)?;
    dir.write_str("config.toml", &cfg.to_toml()?)?;
    Ok(dir)
}

fn chart_file(dir: &mut OutputDir, name: &str, chart: &LineChart) -> CliResult<()> {
    Ok(dir.write_str(name, &chart.render())?)
}

/// Mean slot totals per iteration across runs.
fn mean_aggregate(trs: &[Trajectory], spec: &DemandMarketSpec) -> CliResult<Vec<Vec<f64>>> {
    let mut acc: Option<Vec<Vec<f64>>> = None;
    for tr in trs {
        let trace = aggregate_demand_trace(tr, spec)?;
        match acc.as_mut() {
            None => acc = Some(trace),
            Some(a) => a.iter_mut().flatten().zip(trace.iter().flatten()).for_each(|(x, y)| *x += y),
        }
    }
    let mut a = acc.unwrap_or_default();
    let m = trs.len() as f64;
    a.iter_mut().flatten().for_each(|x| *x /= m);
    Ok(a)
}

fn cmd_simulate(cfg: &ExperimentConfig, base: &Path, out: &Path, command: &str) -> CliResult<()> {
    let pr = prepare(cfg, base)?;
    let trs = simulate_runs(&pr.game, &pr.schedule, &pr.noise, cfg.horizon, cfg.runs, cfg.base_seed)?;
    let emp = EmpiricalDistribution::from_trajectories(&pr.game, &trs)?;
    let mut dir = start(cfg, out, command)?;
    dir.write("trajectory.csv", |w| write_trajectory(w, &trs[0]))?;
    // Single market runs are summarised by the slot totals instead.
    if pr.demand.is_none() || cfg.runs > 1 || command == "simulate" {
        dir.write("empirical.csv", |w| write_empirical(w, &emp))?;
    }

    if let Some(spec) = &pr.demand {
        let agg = mean_aggregate(&trs, spec)?;
        let names: Vec<String> = (1..=spec.slots).map(|k| format!("slot{k}")).collect();
        dir.write("aggregate.csv", |w| write_wide(w, &names, &agg))?;
        let mut chart = LineChart::new(
            format!("Aggregate demand per slot ({}, {})", pr.schedule.describe(), pr.noise.describe()),
            "iteration",
            "aggregate demand",
        );
        for (k, name) in names.iter().enumerate() {
            let ys: Vec<f64> = agg.iter().map(|r| r[k]).collect();
            chart = chart.with(Series::indexed(name.clone(), &ys));
        }
        chart_file(&mut dir, "aggregate.svg", &chart)?;
    }

    // Per-action frequency chart for the first player with few actions.
    let first_small = (0..pr.game.num_players()).find(|&i| pr.game.action_count(i) <= 10);
    if let Some(i) = first_small.filter(|_| pr.demand.is_none()) {
        let labels = pr.game.action_labels(i).to_vec();
        let rows: Vec<Vec<f64>> = (0..=cfg.horizon).map(|t| emp.player_frequencies(t, i).to_vec()).collect();
        let file = format!("{}_frequency", pr.game.players()[i]);
        dir.write(&format!("{file}.csv"), |w| write_wide(w, &labels, &rows))?;
        let mut chart = LineChart::new(
            format!("Action frequencies of {} over {} runs", pr.game.players()[i], cfg.runs),
            "iteration",
            "frequency",
        );
        for (a, l) in labels.iter().enumerate() {
            let ys: Vec<f64> = rows.iter().map(|r| r[a]).collect();
            chart = chart.with(Series::indexed(l.clone(), &ys));
        }
        chart_file(&mut dir, &format!("{file}.svg"), &chart)?;
    }

    let files = dir.files().count();
    dir.finish(cfg.sha256()?, cfg.base_seed)?;
    println!("{command}: {} runs x {} iterations, {files} files in {}", cfg.runs, cfg.horizon, out.display());
    Ok(())
}

#[derive(Serialize)]
struct StateEntry {
    state_index: usize,
    prev_profile: String,
    curr_profile: String,
}

#[derive(Serialize)]
struct StabilitySummary {
    ladder: Vec<f64>,
    gamma: Vec<f64>,
    lambdas: Vec<Vec<usize>>,
    stabilized: bool,
    lambda_star: Option<Vec<StateEntry>>,
    resistance_minimizers: Option<Vec<usize>>,
    resistance_agrees: Option<bool>,
    reference_rate: f64,
    distance_first: f64,
    distance_last: f64,
}

#[derive(Serialize)]
struct StationaryRow {
    state_index: usize,
    probability: f64,
}

fn state_entry(game: &Game, z: usize) -> StateEntry {
    let s = crate::chain::ChainState::from_index(game, z);
    StateEntry { state_index: z, prev_profile: s.prev.to_string(), curr_profile: s.curr.to_string() }
}

fn cmd_analyze(cfg: &ExperimentConfig, base: &Path, out: &Path) -> CliResult<()> {
    let pr = prepare(cfg, base)?;
    let game = &pr.game;
    // Rejects oversized games before any work.
    let structure = KernelStructure::new(game, &pr.noise, DEFAULT_STATE_CAP)?;
    let a = &cfg.analyze;
    let gamma = pr.schedule.gamma().to_vec();
    let stab = stable_states(game, &pr.noise, &a.ladder, &gamma)?;
    let ref_rates: Vec<f64> = gamma.iter().map(|g| g * a.reference_rate).collect();
    let kernel = structure.matrix(&ref_rates)?;
    let pi_ref = stationary_linear(&kernel)?;

    let t_to = a.evolve_to.unwrap_or(cfg.horizon);
    let mut dist = Vec::with_capacity(t_to as usize + 1);
    evolve_each(&Distribution::uniform(structure.states()), game, &pr.schedule, &pr.noise, 0, t_to, |_, pi| {
        dist.push(pi.l1_distance(&pi_ref))
    })?;

    let mut dir = start(cfg, out, "analyze")?;
    dir.write("kernel.csv", |w| write_kernel(w, &kernel))?;
    dir.write("states.csv", |w| write_state_legend(w, game, structure.states()))?;
    let lambda = stab.lambda_star.clone().unwrap_or_else(|| stab.final_report.lambda.clone());
    dir.write("potential.csv", |w| write_potential(w, game, &stab.final_report, &lambda))?;
    dir.write("stationary.csv", |w| {
        write_rows(
            w,
            pi_ref.probs().iter().enumerate().map(|(z, &p)| StationaryRow { state_index: z, probability: p }),
        )
    })?;
    dir.write("distance.csv", |w| write_distance(w, 0, &dist))?;
    let chart = LineChart::new("L1 distance to the reference stationary law", "iteration", "D(t)")
        .with(Series::indexed("D(t)", &dist));
    chart_file(&mut dir, "distance.svg", &chart)?;

    let summary = StabilitySummary {
        ladder: stab.ladder.clone(),
        gamma,
        lambdas: stab.lambdas.clone(),
        stabilized: stab.stabilized(),
        lambda_star: stab.lambda_star.as_ref().map(|ls| ls.iter().map(|&z| state_entry(game, z)).collect()),
        resistance_minimizers: stab.resistance.as_ref().map(|r| r.minimizers.clone()),
        resistance_agrees: stab.resistance_agrees,
        reference_rate: a.reference_rate,
        distance_first: dist[0],
        distance_last: *dist.last().unwrap(),
    };
    dir.write_str("stable_states.json", &(serde_json::to_string_pretty(&summary).map_err(Error::from)? + "\n"))?;
    dir.finish(cfg.sha256()?, cfg.base_seed)?;
    match &stab.lambda_star {
        Some(ls) => println!("analyze: |Z| = {}, {} stochastically stable states", structure.states(), ls.len()),
        None => println!("analyze: |Z| = {}, ladder did not stabilise", structure.states()),
    }
    Ok(())
}

#[derive(Serialize)]
struct TraceSummary {
    p: f64,
    file: String,
    log10_first: f64,
    log10_last: f64,
    rate_cap_holds: bool,
}

#[derive(Serialize)]
struct BoundsReport {
    action_counts: Vec<usize>,
    gamma: Vec<f64>,
    chain_size: f64,
    log10_c_min: f64,
    log10_c_max: f64,
    log10_c_eps: f64,
    log10_c: f64,
    /// Present when C fits a double.
    c: Option<f64>,
    log10_rate_cap: f64,
    t_star: u64,
    delta: f64,
    log10_explicit_rate: f64,
    traces: Vec<TraceSummary>,
}

fn fits(x: LogReal) -> Option<f64> {
    x.fits_f64().then(|| x.to_f64())
}

fn cmd_bounds(cfg: &ExperimentConfig, base: &Path, out: &Path) -> CliResult<()> {
    let c = CliError::config;
    let b = &cfg.bounds;
    let game = match (&b.action_counts, &cfg.game) {
        (Some(_), _) => None,
        (None, Some(_)) => Some(cfg.load_game(base).map_err(c)?.game),
        (None, None) => return Err(c(Error::InvalidArgument("bounds need a game or `bounds.action_counts`".into()))),
    };
    let counts = b.action_counts.clone().or_else(|| game.as_ref().map(|g| g.action_counts())).unwrap();
    let gamma = match (&b.gamma, &game, &cfg.schedule) {
        (Some(g), _, _) => g.clone(),
        (None, Some(g), Some(_)) => cfg.schedule_for(g).map_err(c)?.gamma().to_vec(),
        _ => counts.iter().map(|&k| 1.0 / k as f64).collect(),
    };
    let gamma = if gamma.len() == 1 { vec![gamma[0]; counts.len()] } else { gamma };
    if let Some(&p) = b.p.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
        return Err(c(Error::InvalidArgument(format!("p must lie in (0, 1], got {p}"))));
    }
    let cor = corollary2_constants(&counts, &gamma).map_err(c)?;
    let cc = b.log10_c.map(LogReal::from_log10).unwrap_or(cor.c);
    let n = counts.len();
    let explicit = explicit_rate(n, cc, b.delta).map_err(c)?;
    let horizon = b.horizon.unwrap_or(cfg.horizon);
    if horizon <= b.t_star {
        return Err(c(Error::InvalidArgument(format!("bounds horizon {horizon} must exceed t* = {}", b.t_star))));
    }
    let grid: Vec<u64> = (b.t_star + 1..=horizon).collect();
    let a_min = *counts.iter().min().unwrap() as f64;

    let mut dir = start(cfg, out, "bounds")?;
    let mut chart = LineChart::new("Distance bound", "iteration", "log10 bound");
    let mut traces = Vec::new();
    for &p in &b.p {
        let tr = pseries_bound(&counts, p, b.t_star, &grid, cc)?;
        let file = format!("bounds_p{p}.csv");
        dir.write(&file, |w| write_bounds(w, &tr))?;
        chart = chart.with(Series::new(
            format!("p = {p}"),
            tr.iter().map(|x| (x.t as f64, x.total.log10_abs())).collect(),
        ));
        // Largest rate from t* on is at t*.
        let max_rate = (b.t_star as f64).powf(-p / n as f64) / a_min;
        let holds = cor.rate_cap_holds(max_rate);
        if !holds {
            eprintln!(
                "warning: p = {p}: rate {max_rate:.3e} at t* = {} exceeds the admissible cap {}",
                b.t_star, cor.rate_cap
            );
        }
        traces.push(TraceSummary {
            p,
            file,
            log10_first: tr[0].total.log10_abs(),
            log10_last: tr.last().unwrap().total.log10_abs(),
            rate_cap_holds: holds,
        });
    }
    chart_file(&mut dir, "bounds.svg", &chart)?;
    let report = BoundsReport {
        action_counts: counts,
        gamma,
        chain_size: cor.chain_size,
        log10_c_min: cor.c_min.log10_abs(),
        log10_c_max: cor.c_max.log10_abs(),
        log10_c_eps: cor.c_eps.log10_abs(),
        log10_c: cc.log10_abs(),
        c: fits(cc),
        log10_rate_cap: cor.rate_cap.log10_abs(),
        t_star: b.t_star,
        delta: b.delta,
        log10_explicit_rate: explicit.log10_abs(),
        traces,
    };
    dir.write_str("constants.json", &(serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n"))?;
    dir.finish(cfg.sha256()?, cfg.base_seed)?;
    println!("bounds: C = {}, explicit iterations for delta = {}: {}", cc, b.delta, explicit);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(Error::Infeasible { what: "x", size: "1".into(), cap: 0 }).code, 3);
        assert_eq!(CliError::from(Error::ScheduleViolation { player: 0, t: 1, rate: 2.0 }).code, 2);
        assert_eq!(CliError::from(Error::Singular("x".into())).code, 1);
        let j = CliError::from(Error::InvalidNoise("bad".into())).to_json();
        assert!(j.starts_with('{') && !j.contains('\n'));
    }

    #[test]
    fn presets_match_library_schedules() {
        let cfg = cyber_config(1, 10, 0, "zero");
        let g = crate::studies::cyber_game();
        let s = cfg.schedule_for(&g).unwrap();
        let lib = crate::studies::cyber_schedule();
        for t in [1, 2, 17, 1000] {
            assert_eq!(s.effective_rates(t).unwrap(), lib.effective_rates(t).unwrap());
        }
        let cfg = demand_config(3, 4, 0.5, "zero", false, 10, 1, 0);
        let d = crate::studies::demand_schedule(3, 0.5, false).unwrap();
        let g = cfg.load_game(Path::new(".")).unwrap().game;
        let s = cfg.schedule_for(&g).unwrap();
        for t in [1, 5, 99] {
            assert_eq!(s.effective_rates(t).unwrap(), d.effective_rates(t).unwrap());
        }
    }

    #[test]
    fn overrides_win() {
        let mut cfg = cyber_config(1, 10, 0, "zero");
        let o = Overrides { seed: Some(5), fixed_rate: Some(0.2), noise: Some("uniform:1".into()), ..Default::default() };
        apply_overrides(&mut cfg, &o);
        assert_eq!(cfg.base_seed, 5);
        assert_eq!(cfg.noise, "uniform:1");
        let sc = cfg.schedule.unwrap();
        assert_eq!((sc.kind, sc.value), (ScheduleKind::Fixed, Some(0.2)));
    }
}
