//! Flat TOML configuration. Keys are the long flag names with `_` for `-`.
//! A flag always overrides the file; the file overrides `QTP_SEED`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::Context;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use qtp_core::certify::{Adversary, Criterion, ThresholdSource};
use qtp_core::{InputFamily, ProtocolId, Quadrature};

/// Invalid user input; exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Exact,
    #[value(name = "monte_carlo", alias = "monte-carlo")]
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AverageKind {
    /// Mean over θ on [0, π) for the GHZ family.
    #[default]
    Theta,
    /// Sphere averages for single-qubit pb and pab.
    Bloch,
}

/// `gauss:N` or `grid:N`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(try_from = "String")]
pub struct QuadratureSpec(pub Quadrature);

impl fmt::Display for QuadratureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Quadrature::Gauss(n) => write!(f, "gauss:{n}"),
            Quadrature::Grid(n) => write!(f, "grid:{n}"),
        }
    }
}

impl FromStr for QuadratureSpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let bad = || ConfigError(format!("quadrature `{s}` is not of the form gauss:N or grid:N"));
        let (kind, n) = s.split_once(':').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "gauss" => Ok(Self(Quadrature::Gauss(n))),
            "grid" | "midpoint" => Ok(Self(Quadrature::Grid(n))),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for QuadratureSpec {
    type Error = ConfigError;

    fn try_from(s: String) -> Result<Self, ConfigError> {
        s.parse()
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub protocol: Option<ProtocolId>,
    pub m: Option<usize>,
    pub family: Option<InputFamily>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub mode: Option<Mode>,
    pub shots: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub quadrature: Option<QuadratureSpec>,
    pub nodes: Option<usize>,
    pub criterion: Option<Criterion>,
    pub model: Option<Adversary>,
    pub threshold_source: Option<ThresholdSource>,
    pub observed: Option<f64>,
    pub format: Option<Format>,
    pub points: Option<usize>,
    pub theta_min: Option<f64>,
    pub theta_max: Option<f64>,
    pub kind: Option<AverageKind>,
    pub postselect: Option<u8>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| config_error(format!("invalid config {}: {e}", path.display())))
            .context("loading configuration")
    }
}

/// Seed from the flag, then the file, then the environment.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>, env: Option<&str>) -> anyhow::Result<Option<u64>> {
    if let Some(seed) = flag.or(file) {
        return Ok(Some(seed));
    }
    env.map(|s| {
        s.trim()
            .parse()
            .map_err(|_| config_error(format!("QTP_SEED `{s}` is not an unsigned integer")))
    })
    .transpose()
}
