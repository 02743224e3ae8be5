//! Measurement noise added to the utilities players receive.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseKind {
    Zero,
    /// Uniform on `[-bound, bound]`.
    Uniform { bound: f64 },
    Gaussian { sigma: f64 },
    /// Uniform on `[-scale ln t, scale ln t]` for t >= 2 and zero before.
    /// Not identically distributed over time.
    GrowingUniform { scale: f64 },
}

impl NoiseKind {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidNoise(format!("{what} must be finite and >= 0, got {v}")));
        match *self {
            NoiseKind::Zero => Ok(()),
            NoiseKind::Uniform { bound } if !(bound >= 0.0 && bound.is_finite()) => bad("bound", bound),
            NoiseKind::Gaussian { sigma } if !(sigma >= 0.0 && sigma.is_finite()) => bad("sigma", sigma),
            NoiseKind::GrowingUniform { scale } if !(scale >= 0.0 && scale.is_finite()) => bad("scale", scale),
            _ => Ok(()),
        }
    }

    /// Identically distributed over time.
    pub fn is_iid(&self) -> bool {
        !matches!(self, NoiseKind::GrowingUniform { scale } if *scale > 0.0)
    }

    /// Almost-sure bound on |w|, when one exists and is time independent.
    pub fn bound(&self) -> Option<f64> {
        match *self {
            NoiseKind::Zero => Some(0.0),
            NoiseKind::Uniform { bound } => Some(bound),
            NoiseKind::Gaussian { sigma: 0.0 } => Some(0.0),
            NoiseKind::GrowingUniform { scale: 0.0 } => Some(0.0),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bound() == Some(0.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, t: u64, rng: &mut R) -> f64 {
        match *self {
            NoiseKind::Zero => 0.0,
            NoiseKind::Uniform { bound } => uniform_symmetric(bound, rng),
            NoiseKind::Gaussian { sigma } => {
                if sigma == 0.0 {
                    0.0
                } else {
                    Normal::new(0.0, sigma).expect("validated sigma").sample(rng)
                }
            }
            NoiseKind::GrowingUniform { scale } => {
                let bound = if t >= 2 { scale * (t as f64).ln() } else { 0.0 };
                uniform_symmetric(bound, rng)
            }
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            NoiseKind::Zero => "zero".into(),
            NoiseKind::Uniform { bound } => format!("uniform:{bound}"),
            NoiseKind::Gaussian { sigma } => format!("gaussian:{sigma}"),
            NoiseKind::GrowingUniform { scale } => format!("growing:{scale}"),
        }
    }
}

fn uniform_symmetric<R: Rng + ?Sized>(bound: f64, rng: &mut R) -> f64 {
    if bound == 0.0 {
        0.0
    } else {
        rng.random_range(-bound..=bound)
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    /// `zero`, `uniform:<bound>`, `gaussian:<sigma>` or `growing:<scale>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let value = || -> Result<f64> {
            arg.ok_or_else(|| Error::InvalidNoise(format!("`{s}` needs a parameter")))?
                .parse::<f64>()
                .map_err(|e| Error::InvalidNoise(format!("`{s}`: {e}")))
        };
        let kind = match name {
            "zero" | "none" => NoiseKind::Zero,
            "uniform" => NoiseKind::Uniform { bound: value()? },
            "gaussian" => NoiseKind::Gaussian { sigma: value()? },
            "growing" | "growing-uniform" => NoiseKind::GrowingUniform { scale: value()? },
            _ => return Err(Error::InvalidNoise(format!("unknown noise kind `{name}`"))),
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// Noise law per player; either one law shared by all or one each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseModel {
    Shared(NoiseKind),
    PerPlayer(Vec<NoiseKind>),
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::Shared(NoiseKind::Zero)
    }
}

impl NoiseModel {
    pub fn zero() -> Self {
        NoiseModel::Shared(NoiseKind::Zero)
    }

    pub fn shared(kind: NoiseKind) -> Self {
        NoiseModel::Shared(kind)
    }

    pub fn kind(&self, player: usize) -> NoiseKind {
        match self {
            NoiseModel::Shared(k) => *k,
            NoiseModel::PerPlayer(v) => v[player],
        }
    }

    pub fn validate(&self, players: usize) -> Result<()> {
        match self {
            NoiseModel::Shared(k) => k.validate(),
            NoiseModel::PerPlayer(v) => {
                if v.len() != players {
                    return Err(Error::InvalidNoise(format!("{} noise laws for {players} players", v.len())));
                }
                v.iter().try_for_each(NoiseKind::validate)
            }
        }
    }

    pub fn is_iid(&self) -> bool {
        match self {
            NoiseModel::Shared(k) => k.is_iid(),
            NoiseModel::PerPlayer(v) => v.iter().all(NoiseKind::is_iid),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            NoiseModel::Shared(k) => k.is_zero(),
            NoiseModel::PerPlayer(v) => v.iter().all(NoiseKind::is_zero),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            NoiseModel::Shared(k) => k.describe(),
            NoiseModel::PerPlayer(v) => v.iter().map(NoiseKind::describe).collect::<Vec<_>>().join(","),
        }
    }
}
