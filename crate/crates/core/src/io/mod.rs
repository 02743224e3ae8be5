//! File formats: experiment configs, CSV tables, run manifests and charts.

mod config;
mod manifest;
mod svg;
mod tables;

pub use config::{
    check_rates, AnalyzeConfig, BoundsConfig, DemandConfig, ExperimentConfig, LoadedGame, ScheduleConfig, ScheduleKind,
};
pub use manifest::{OutputDir, OutputEntry, RunManifest, MANIFEST_NAME};
pub use svg::{LineChart, Series};
pub use tables::{
    read_rows, write_bounds, write_distance, write_empirical, write_kernel, write_potential, write_rows,
    write_state_legend, write_trajectory, write_wide, BoundRow, DistanceRow, EmpiricalRow, KernelRow, PotentialRow,
    StateRow, TrajectoryRow,
};
