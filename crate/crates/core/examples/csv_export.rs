//! Simulate a game read from JSON and write the CSV tables and a chart.
//!
//!     cargo run --example csv_export -- [output-dir]

use std::fs::File;
use std::path::PathBuf;

use gtrl::io::{write_empirical, write_trajectory, LineChart, Series};
use gtrl::learning::{simulate_runs, EmpiricalDistribution};
use gtrl::noise::{NoiseKind, NoiseModel};
use gtrl::schedule::Schedule;
use gtrl::Game;

const GAME: &str = r#"{
  "schema_version": 1,
  "players": ["row", "column"],
  "actions": [["stag", "hare"], ["stag", "hare"]],
  "utilities": [[4, 0, 3, 3], [4, 3, 0, 3]]
}"#;

fn main() -> gtrl::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("gtrl-csv"));
    std::fs::create_dir_all(&dir)?;
    let game = Game::from_json(GAME)?;
    let schedule = Schedule::canonical(&game.action_counts(), 1.0)?;
    let noise = NoiseModel::shared(NoiseKind::Uniform { bound: 0.5 });
    let runs = simulate_runs(&game, &schedule, &noise, 2000, 50, 1)?;
    let emp = EmpiricalDistribution::from_trajectories(&game, &runs)?;

    write_trajectory(File::create(dir.join("trajectory.csv"))?, &runs[0])?;
    write_empirical(File::create(dir.join("empirical.csv"))?, &emp)?;
    let stag: Vec<f64> = (0..=2000).map(|t| emp.action_frequency(t, 0, 0)).collect();
    let chart = LineChart::new("Row player, share playing stag", "iteration", "frequency")
        .with(Series::indexed("stag", &stag));
    std::fs::write(dir.join("stag.svg"), chart.render())?;
    println!("wrote trajectory.csv, empirical.csv and stag.svg to {}", dir.display());
    Ok(())
}
