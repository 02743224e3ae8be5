//! TOML experiment configuration.
//!
//! ```toml
//! game = "cyber"          # "cyber", "demand" or a JSON game file
//! horizon = 10000
//! runs = 100
//! base_seed = 2024
//! noise = "zero"          # zero | uniform:<E> | gaussian:<sigma> | growing:<scale>
//!
//! [schedule]
//! kind = "pseries"        # pseries | fixed | custom-table
//! gamma = [0.0909, 0.0909]
//! p = 1.0
//! deviation = { kind = "inverse-square", scale = 0.00909 }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::game::Game;
use crate::noise::{NoiseKind, NoiseModel};
use crate::schedule::{CommonRate, Deviation, Schedule};
use crate::studies::{cyber_game, demand_game, DemandMarketSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    /// `gamma_i t^(-p/N)`.
    Pseries,
    /// `gamma_i * value`.
    Fixed,
    /// `gamma_i * table[t - 1]`.
    CustomTable,
}

fn zero_deviation() -> Deviation {
    Deviation::Zero
}

fn is_zero_deviation(d: &Deviation) -> bool {
    *d == Deviation::Zero
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub kind: ScheduleKind,
    /// Defaults to `1/|A_i|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<f64>>,
    #[serde(default = "zero_deviation", skip_serializing_if = "is_zero_deviation")]
    pub deviation: Deviation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandConfig {
    pub customers: usize,
    pub slots: usize,
    #[serde(default = "one")]
    pub rho: f64,
    #[serde(default = "default_xi")]
    pub xi: f64,
}

fn one() -> f64 {
    1.0
}

fn default_xi() -> f64 {
    1.1
}

impl DemandConfig {
    pub fn spec(&self) -> DemandMarketSpec {
        let mut s = DemandMarketSpec::uniform(self.customers, self.slots);
        s.rho = vec![self.rho; self.customers];
        s.xi = vec![self.xi; self.customers];
        s
    }
}

fn default_ladder() -> Vec<f64> {
    vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
}

fn default_reference() -> f64 {
    1e-3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    /// Common rates for the Λ* ladder, strictly decreasing.
    #[serde(default = "default_ladder")]
    pub ladder: Vec<f64>,
    /// Common rate of the reference stationary distribution for D(t).
    #[serde(default = "default_reference")]
    pub reference_rate: f64,
    /// Last iteration of the exact evolution; defaults to `horizon`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve_to: Option<u64>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig { ladder: default_ladder(), reference_rate: default_reference(), evolve_to: None }
    }
}

fn default_ps() -> Vec<f64> {
    vec![1.0]
}

fn default_t_star() -> u64 {
    1
}

fn default_delta() -> f64 {
    0.1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    /// Overrides the game's action counts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_counts: Option<Vec<usize>>,
    /// Defaults to the schedule's gamma, else `1/|A_i|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    /// One trace per exponent.
    #[serde(default = "default_ps")]
    pub p: Vec<f64>,
    #[serde(default = "default_t_star")]
    pub t_star: u64,
    /// Last t of the traces; defaults to `horizon`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    /// Target distance for the explicit iteration count.
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// log10 of C; defaults to the closed-form constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log10_c: Option<f64>,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            action_counts: None,
            gamma: None,
            p: default_ps(),
            t_star: default_t_star(),
            horizon: None,
            delta: default_delta(),
            log10_c: None,
        }
    }
}

fn default_runs() -> usize {
    1
}

fn default_noise() -> String {
    "zero".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<String>,
    pub horizon: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_noise")]
    pub noise: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand: Option<DemandConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleConfig>,
    #[serde(default)]
    pub analyze: AnalyzeConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
}

/// A game together with the market it came from, if any.
pub struct LoadedGame {
    pub game: Game,
    pub demand: Option<DemandMarketSpec>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads a config; relative game paths resolve against its directory.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let cfg = ExperimentConfig::from_toml(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }

    /// Hex SHA-256 of the canonical TOML form, after any overrides.
    pub fn sha256(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_toml()?.as_bytes())))
    }

    pub fn load_game(&self, base: &Path) -> Result<LoadedGame> {
        let name = self.game.as_deref().ok_or_else(|| Error::InvalidArgument("config names no game".into()))?;
        match name {
            "cyber" => Ok(LoadedGame { game: cyber_game(), demand: None }),
            "demand" => {
                let d = self
                    .demand
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument("game = \"demand\" needs a [demand] section".into()))?;
                let spec = d.spec();
                Ok(LoadedGame { game: demand_game(&spec)?, demand: Some(spec) })
            }
            file => {
                let path = base.join(file);
                let text =
                    std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                Ok(LoadedGame { game: Game::from_json(&text)?, demand: None })
            }
        }
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        Ok(NoiseModel::shared(self.noise.parse::<NoiseKind>()?))
    }

    pub fn schedule_for(&self, game: &Game) -> Result<Schedule> {
        let sc = self.schedule.as_ref().ok_or_else(|| Error::InvalidSchedule("config has no [schedule]".into()))?;
        let n = game.num_players();
        let gamma = match &sc.gamma {
            Some(g) if g.len() == 1 => vec![g[0]; n],
            Some(g) => g.clone(),
            None => game.action_counts().iter().map(|&k| 1.0 / k as f64).collect(),
        };
        let need = |v: Option<f64>, what: &str| {
            v.ok_or_else(|| Error::InvalidSchedule(format!("schedule kind {:?} needs `{what}`", sc.kind)))
        };
        let base = match sc.kind {
            ScheduleKind::Pseries => Schedule::pseries(gamma, need(sc.p, "p")?)?,
            ScheduleKind::Fixed => Schedule::fixed(gamma, need(sc.value, "value")?)?,
            ScheduleKind::CustomTable => {
                let values = sc
                    .table
                    .clone()
                    .ok_or_else(|| Error::InvalidSchedule("schedule kind custom-table needs `table`".into()))?;
                Schedule::new(gamma, CommonRate::Table { values }, vec![Deviation::Zero; n])?
            }
        };
        Ok(base.with_deviation(sc.deviation.clone()))
    }
}

/// First (player, t) in `1..=horizon` whose effective rate leaves (0, 1].
pub fn check_rates(schedule: &Schedule, horizon: u64) -> Result<()> {
    for t in 1..=horizon {
        for (i, r) in schedule.effective_rates(t)?.into_iter().enumerate() {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::ScheduleViolation { player: i, t, rate: r });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CYBER: &str = r#"
game = "cyber"
horizon = 100
runs = 4
base_seed = 7

[schedule]
kind = "pseries"
gamma = [0.09090909090909091]
p = 1.0
deviation = { kind = "inverse-square", scale = 0.00909090909090909 }
"#;

    #[test]
    fn parses_and_builds() {
        let cfg = ExperimentConfig::from_toml(CYBER).unwrap();
        let lg = cfg.load_game(Path::new(".")).unwrap();
        let s = cfg.schedule_for(&lg.game).unwrap();
        let want = 1.0 / (11.0 * 2f64.sqrt()) + 1.0 / 440.0;
        assert!((s.effective_rate(0, 2).unwrap() - want).abs() < 1e-15);
        assert_eq!(cfg.noise_model().unwrap(), NoiseModel::zero());
        assert_eq!(cfg.analyze, AnalyzeConfig::default());
    }

    #[test]
    fn hash_tracks_overrides() {
        let mut cfg = ExperimentConfig::from_toml(CYBER).unwrap();
        let h = cfg.sha256().unwrap();
        assert_eq!(h, ExperimentConfig::from_toml(CYBER).unwrap().sha256().unwrap());
        cfg.base_seed = 8;
        assert_ne!(h, cfg.sha256().unwrap());
    }

    #[test]
    fn canonical_form_round_trips() {
        let cfg = ExperimentConfig::from_toml(CYBER).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_toml("horizon = 5\nhorizn = 6\n").is_err());
    }

    #[test]
    fn rate_check_names_player_and_t() {
        let s = Schedule::fixed(vec![0.5, 2.0], 0.9).unwrap();
        match check_rates(&s, 10) {
            Err(Error::ScheduleViolation { player: 1, t: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}
