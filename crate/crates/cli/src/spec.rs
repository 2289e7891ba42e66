//! Experiment specifications and their parameter sets.
//!
//! A spec names an experiment, a seed, an optional output target and a table
//! of parameter overrides. Overrides are merged onto the experiment's defaults
//! and unknown keys are rejected.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    Witness,
    SquareHolonomy,
    DegeneracySweep,
    AdiabaticSweep,
    NoiseEnsemble,
    PathPerturb,
    Gyro,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 7] = [
        ExperimentName::Witness,
        ExperimentName::SquareHolonomy,
        ExperimentName::DegeneracySweep,
        ExperimentName::AdiabaticSweep,
        ExperimentName::NoiseEnsemble,
        ExperimentName::PathPerturb,
        ExperimentName::Gyro,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::Witness => "witness",
            ExperimentName::SquareHolonomy => "square_holonomy",
            ExperimentName::DegeneracySweep => "degeneracy_sweep",
            ExperimentName::AdiabaticSweep => "adiabatic_sweep",
            ExperimentName::NoiseEnsemble => "noise_ensemble",
            ExperimentName::PathPerturb => "path_perturb",
            ExperimentName::Gyro => "gyro",
        }
    }

    /// Format used when neither the caller nor the output name picks one.
    pub fn default_format(self) -> Format {
        match self {
            ExperimentName::DegeneracySweep | ExperimentName::AdiabaticSweep => Format::Csv,
            _ => Format::Json,
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let key = s.replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == key)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|e| e.as_str()).collect();
                CliError::config(format!(
                    "unknown experiment '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    pub fn from_path(path: &str) -> Option<Self> {
        match std::path::Path::new(path).extension()?.to_str()? {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub experiment: ExperimentName,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub format: Option<Format>,
    /// File name, or `-` for standard output.
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub params: toml::Table,
}

impl ExperimentSpec {
    pub fn new(experiment: ExperimentName) -> Self {
        Self {
            experiment,
            seed: None,
            format: None,
            output: None,
            params: toml::Table::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn set(&mut self, key: &str, value: impl Into<toml::Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    /// Applies a `key=value` override; the value is read as TOML and falls
    /// back to a bare string.
    pub fn set_from_str(&mut self, assignment: &str) -> CliResult<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("override '{assignment}' is not key=value")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(CliError::config(format!(
                "override '{assignment}' has an empty key"
            )));
        }
        let raw = raw.trim();
        let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        self.set(key, value);
        Ok(())
    }

    /// Defaults of `P` overlaid with this spec's parameters.
    pub fn resolve<P: DeserializeOwned>(&self) -> CliResult<P> {
        toml::Value::Table(self.params.clone())
            .try_into()
            .map_err(|e: toml::de::Error| {
                CliError::config(format!("{} parameters: {}", self.experiment, e.message()))
            })
    }
}

/// Splits a batch file into documents separated by `---` lines.
pub fn parse_batch(text: &str) -> CliResult<Vec<ExperimentSpec>> {
    let mut docs = vec![String::new()];
    for line in text.lines() {
        if line.trim() == "---" {
            docs.push(String::new());
        } else {
            let doc = docs.last_mut().expect("at least one document");
            doc.push_str(line);
            doc.push('\n');
        }
    }
    docs.iter()
        .filter(|d| {
            d.lines()
                .any(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        })
        .enumerate()
        .map(|(i, d)| {
            ExperimentSpec::parse(d).map_err(|e| match e {
                CliError::Config(m) => CliError::config(format!("batch document {}: {m}", i + 1)),
                other => other,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ConnectionKind {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessParams {
    pub path_a: String,
    pub path_b: String,
    pub steps: usize,
    /// `1` for `|+1⟩`, `0` for `|0⟩`.
    pub initial_ms: i32,
    pub connection: ConnectionKind,
}

impl Default for WitnessParams {
    fn default() -> Self {
        Self {
            path_a: "circle".into(),
            path_b: "square".into(),
            steps: nvholo::holonomy::DEFAULT_STEPS,
            initial_ms: 1,
            connection: ConnectionKind::Analytic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HolonomyParams {
    pub path: String,
    pub steps: usize,
    pub connection: ConnectionKind,
}

impl Default for HolonomyParams {
    fn default() -> Self {
        Self {
            path: "square".into(),
            steps: nvholo::holonomy::DEFAULT_STEPS,
            connection: ConnectionKind::Analytic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepParams {
    pub path: String,
    pub deltas: Vec<f64>,
    /// Units of `1/D`.
    pub times: Vec<f64>,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self {
            path: "circle".into(),
            deltas: vec![-2e-5, -1e-5, 0.0, 1e-5, 2e-5, 1e-4, 1e-2],
            times: vec![1e4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdiabaticParams {
    pub path: String,
    pub delta: f64,
    pub times: Vec<f64>,
}

impl Default for AdiabaticParams {
    fn default() -> Self {
        Self {
            path: "circle".into(),
            delta: 0.0,
            times: vec![1e2, 3e2, 1e3, 3e3, 1e4, 3e4, 1e5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseParams {
    pub path: String,
    /// Standard deviation of `ε`, units of `D`.
    pub sigma: f64,
    pub events: usize,
    pub members: usize,
    pub total_time: f64,
    pub delta: f64,
    /// Time steps per run; chosen from `total_time` when absent.
    pub steps: Option<usize>,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            path: "circle".into(),
            sigma: 1e-4,
            events: nvholo::noise::DEFAULT_EVENTS,
            members: nvholo::noise::DEFAULT_MEMBERS,
            total_time: 1e4,
            delta: 0.0,
            steps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbParams {
    pub path: String,
    pub divergence_deg: f64,
    pub members: usize,
    pub total_time: f64,
    pub delta: f64,
}

impl Default for PerturbParams {
    fn default() -> Self {
        Self {
            path: "circle".into(),
            divergence_deg: 2.0,
            members: nvholo::noise::DEFAULT_MEMBERS,
            total_time: 1e4,
            delta: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GyroCliParams {
    pub n: f64,
    pub eta: f64,
    pub contrast: f64,
    /// Seconds.
    pub t1: f64,
    /// Seconds.
    pub t2star: f64,
    /// Seconds.
    pub tau: f64,
    /// rad/s.
    pub omega: f64,
    /// Seconds.
    pub t: f64,
    pub curve_points: usize,
    pub curve_max_omega_t: f64,
}

impl Default for GyroCliParams {
    fn default() -> Self {
        Self {
            n: 1e6,
            eta: 0.1,
            contrast: 0.2,
            t1: 1e-3,
            t2star: 1e-6,
            tau: 1.0,
            omega: 0.0,
            t: 1e-3,
            curve_points: 101,
            curve_max_omega_t: 2.0 * SQRT_2 * PI,
        }
    }
}
