//! Run configuration: one JSON document, unknown keys rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use deltalap::point_laplacian::bound_state_omega;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    ResolventChecks,
    Theorem21,
    Theorem22,
    GammaNorms,
    PropagateLinear,
    NlsStrang,
    NlsPicard,
    RescalingChecks,
    EmbeddingSweep,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::ResolventChecks => "resolvent_checks",
            Experiment::Theorem21 => "theorem21",
            Experiment::Theorem22 => "theorem22",
            Experiment::GammaNorms => "gamma_norms",
            Experiment::PropagateLinear => "propagate_linear",
            Experiment::NlsStrang => "nls_strang",
            Experiment::NlsPicard => "nls_picard",
            Experiment::RescalingChecks => "rescaling_checks",
            Experiment::EmbeddingSweep => "embedding_sweep",
        }
    }

    /// Experiments that take `(ω − Δ_α)^{−1/2}` and so need `ω > ω₀`.
    pub fn needs_fractional_power(self) -> bool {
        matches!(
            self,
            Experiment::Theorem21 | Experiment::Theorem22 | Experiment::GammaNorms | Experiment::EmbeddingSweep
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "L")]
    pub box_size: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n: 512, box_size: 40.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub alpha: f64,
    pub omega: f64,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        OperatorConfig { alpha: 0.1, omega: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_final: f64,
    pub n_steps: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig { t_final: 1.0, n_steps: 256 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NlsConfig {
    pub p: f64,
    pub mu: i32,
}

impl Default for NlsConfig {
    fn default() -> Self {
        NlsConfig { p: 3.0, mu: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub n_nodes: usize,
    pub t_max_factor: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            n_nodes: deltalap::quadrature::DEFAULT_NODES,
            t_max_factor: deltalap::quadrature::DEFAULT_T_MAX_FACTOR,
        }
    }
}

fn default_seed() -> u64 {
    20_240_601
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("deltalap-out")
}

/// Everything a run depends on. Omitted sections take their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub operator: OperatorConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub nls: NlsConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

/// Why a configuration was rejected.
#[derive(Debug)]
pub enum ConfigError {
    Read(std::io::Error),
    Parse(serde_json::Error),
    Invalid(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Read(e) => write!(f, "cannot read config: {e}"),
            ConfigError::Parse(e) => write!(f, "cannot parse config: {e}"),
            ConfigError::Invalid(list) => write!(f, "invalid config: {}", list.join("; ")),
        }
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        RunConfig {
            experiment,
            grid: GridConfig::default(),
            operator: OperatorConfig::default(),
            time: TimeConfig::default(),
            nls: NlsConfig::default(),
            quadrature: QuadratureConfig::default(),
            seed: default_seed(),
            output_dir: default_output_dir(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(ConfigError::Parse)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(ConfigError::Read)?;
        Self::from_json(&text)
    }

    /// Checks every documented range, collecting all violations.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut bad = Vec::new();
        let n = self.grid.n;
        if n < 16 || !n.is_power_of_two() {
            bad.push(format!("grid.n must be a power of two ≥ 16, got {n}"));
        }
        if !(self.grid.box_size > 0.0) || !self.grid.box_size.is_finite() {
            bad.push(format!("grid.L must be positive, got {}", self.grid.box_size));
        }
        if !self.operator.alpha.is_finite() {
            bad.push("operator.alpha must be finite".into());
        }
        let omega = self.operator.omega;
        if !(omega > 0.0) || !omega.is_finite() {
            bad.push(format!("operator.omega must be positive, got {omega}"));
        } else if self.experiment.needs_fractional_power() && self.operator.alpha.is_finite() {
            let w0 = bound_state_omega(self.operator.alpha);
            if !(omega > w0) {
                bad.push(format!("operator.omega = {omega} must exceed omega0 = {w0} for {}", self.experiment.name()));
            }
        }
        if !(self.time.t_final > 0.0) || !self.time.t_final.is_finite() {
            bad.push(format!("time.t_final must be positive, got {}", self.time.t_final));
        }
        if self.time.n_steps == 0 {
            bad.push("time.n_steps must be ≥ 1".into());
        }
        if !(self.nls.p > 1.0) || !self.nls.p.is_finite() {
            bad.push(format!("nls.p must exceed 1, got {}", self.nls.p));
        }
        if self.nls.mu * self.nls.mu != 1 {
            bad.push(format!("nls.mu must be ±1, got {}", self.nls.mu));
        }
        if self.quadrature.n_nodes < 8 {
            bad.push(format!("quadrature.n_nodes must be ≥ 8, got {}", self.quadrature.n_nodes));
        }
        if !(self.quadrature.t_max_factor >= 1.0) || !self.quadrature.t_max_factor.is_finite() {
            bad.push(format!(
                "quadrature.t_max_factor must be ≥ 1, got {}",
                self.quadrature.t_max_factor
            ));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(bad))
        }
    }
}
