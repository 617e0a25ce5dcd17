//! Run configuration: the JSON file, command-line overrides and defaults.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use cqg_core::epr::{MIN_GAUSS_NODES, MIN_PERIODIC_NODES};
use cqg_core::FiniteDiff;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Fluxes,
    BellScan,
    Chsh,
    Nosignal,
    Curvature,
    GaugeCheck,
    Residuals,
    Mc,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Fluxes => "fluxes",
            Command::BellScan => "bell-scan",
            Command::Chsh => "chsh",
            Command::Nosignal => "nosignal",
            Command::Curvature => "curvature",
            Command::GaugeCheck => "gauge-check",
            Command::Residuals => "residuals",
            Command::Mc => "mc",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Node counts for the `(α, β, γ)` axes of the Haar rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureNodes {
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
}

impl Default for QuadratureNodes {
    fn default() -> Self {
        Self {
            alpha: 8,
            beta: 8,
            gamma: 8,
        }
    }
}

/// Contents of the `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub theta_a_deg: Option<Vec<f64>>,
    pub theta_b_deg: Option<Vec<f64>>,
    pub delta_deg: Option<Vec<f64>>,
    /// `(a, a′, b, b′)`
    pub chsh_deg: Option<[f64; 4]>,
    pub local_euler_deg: Option<[f64; 3]>,
    pub gyration_scale: Option<f64>,
    pub gyration_scales: Option<Vec<f64>>,
    pub quadrature: Option<QuadratureNodes>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub streams: Option<usize>,
    pub fd_step: Option<f64>,
    pub fd_levels: Option<usize>,
    pub hbar: Option<f64>,
    pub wave_k: Option<[f64; 3]>,
    pub points: Option<usize>,
    pub gauge_trials: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }
}

/// Flags given on the command line; they take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Fully resolved and validated run settings. Angles are in degrees.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub command: Command,
    pub theta_a_deg: Vec<f64>,
    pub theta_b_deg: Vec<f64>,
    pub delta_deg: Vec<f64>,
    pub chsh_deg: [f64; 4],
    pub local_euler_deg: [f64; 3],
    pub gyration_scale: f64,
    pub gyration_scales: Vec<f64>,
    pub quadrature: QuadratureNodes,
    pub samples: u64,
    pub seed: u64,
    pub streams: usize,
    pub fd: FiniteDiff,
    pub hbar: f64,
    pub wave_k: [f64; 3],
    pub points: usize,
    pub gauge_trials: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// `lo, lo + step, …, hi` in degrees.
pub fn degree_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|k| lo + step * k as f64).collect()
}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

fn finite_list(name: &str, values: &[f64]) -> Result<(), ConfigError> {
    if values.is_empty() {
        return err(format!("{name} is empty"));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return err(format!("{name} contains {v}"));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if !(v > 0.0 && v.is_finite()) {
        return err(format!("{name} = {v} must be positive"));
    }
    Ok(())
}

impl Settings {
    pub fn resolve(command: Command, file: RunConfig, flags: Overrides) -> Result<Self, ConfigError> {
        if let Some(c) = file.command {
            if c != command {
                return err(format!("config is for `{c}` but `{command}` was requested"));
            }
        }
        let (theta_a, theta_b) = match command {
            Command::Mc => (vec![0.0], degree_grid(0.0, 180.0, 45.0)),
            Command::Nosignal => (vec![30.0], degree_grid(0.0, 350.0, 10.0)),
            _ => (degree_grid(0.0, 180.0, 10.0), degree_grid(0.0, 180.0, 10.0)),
        };
        let points = match command {
            Command::Curvature => 50,
            _ => 100,
        };
        let fd = FiniteDiff::new(file.fd_step.unwrap_or(1e-3), file.fd_levels.unwrap_or(1))
            .map_err(|e| ConfigError(e.to_string()))?;
        let s = Settings {
            command,
            theta_a_deg: file.theta_a_deg.unwrap_or(theta_a),
            theta_b_deg: file.theta_b_deg.unwrap_or(theta_b),
            delta_deg: file.delta_deg.unwrap_or_else(|| degree_grid(0.0, 45.0, 5.0)),
            chsh_deg: file.chsh_deg.unwrap_or([0.0, 90.0, 45.0, 135.0]),
            local_euler_deg: file.local_euler_deg.unwrap_or([40.0, 70.0, 20.0]),
            gyration_scale: file.gyration_scale.unwrap_or(1.0),
            gyration_scales: file.gyration_scales.unwrap_or_else(|| vec![0.5, 1.0, 2.0]),
            quadrature: file.quadrature.unwrap_or_default(),
            samples: flags.samples.or(file.samples).unwrap_or(1_000_000),
            seed: flags.seed.or(file.seed).unwrap_or(42),
            streams: file.streams.unwrap_or(0),
            fd,
            hbar: file.hbar.unwrap_or(1.0),
            wave_k: file.wave_k.unwrap_or([0.4, -0.2, 0.7]),
            points: file.points.unwrap_or(points),
            gauge_trials: file.gauge_trials.unwrap_or(10),
            out: flags.out.or(file.out),
            format: flags.format.or(file.format).unwrap_or_default(),
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        finite_list("theta_a_deg", &self.theta_a_deg)?;
        finite_list("theta_b_deg", &self.theta_b_deg)?;
        finite_list("delta_deg", &self.delta_deg)?;
        finite_list("chsh_deg", &self.chsh_deg)?;
        finite_list("local_euler_deg", &self.local_euler_deg)?;
        finite_list("gyration_scales", &self.gyration_scales)?;
        finite_list("wave_k", &self.wave_k)?;
        positive("gyration_scale", self.gyration_scale)?;
        for &a in &self.gyration_scales {
            positive("gyration_scales entry", a)?;
        }
        positive("hbar", self.hbar)?;
        let [_, beta, _] = self.local_euler_deg;
        if !(0.0..=180.0).contains(&beta) {
            return err(format!("local β = {beta}° lies outside [0°, 180°]"));
        }
        let q = self.quadrature;
        if q.alpha < MIN_PERIODIC_NODES || q.gamma < MIN_PERIODIC_NODES {
            return err(format!("periodic quadrature axes need at least {MIN_PERIODIC_NODES} nodes"));
        }
        if q.beta < MIN_GAUSS_NODES {
            return err(format!("the β axis needs at least {MIN_GAUSS_NODES} nodes"));
        }
        if q.alpha.max(q.beta).max(q.gamma) > 512 {
            return err("quadrature node counts are capped at 512");
        }
        if self.samples == 0 {
            return err("samples must be positive");
        }
        if self.points == 0 {
            return err("points must be positive");
        }
        if self.gauge_trials == 0 {
            return err("gauge_trials must be positive");
        }
        Ok(())
    }
}
