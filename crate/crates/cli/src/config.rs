//! Strict JSON scenario file. Every group is optional at parse time; each
//! command asks for the groups it needs.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use pathamp_core::{
    ImpulseModel, OscillatorNetwork, QuadratureSpec, SchrodingerSide, SourceDynamics, TestFunction,
    TwinSlitScenario, ValidationError,
};
use serde::Deserialize;

use crate::error::CliError;

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "one")]
    pub hbar: f64,
    pub network: Option<NetworkConfig>,
    pub source: Option<SourceConfig>,
    pub quadrature: Option<QuadratureConfig>,
    pub twinslit: Option<TwinSlitConfig>,
    pub schrodinger: Option<SchrodingerConfig>,
    pub converge: Option<ConvergeConfig>,
    pub metric: Option<MetricConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// One oscillator by default; `k12` makes a pair, `coupling` gives the full
/// symmetric matrix.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub mass: f64,
    pub spring: f64,
    pub dt: f64,
    pub steps: usize,
    pub k12: Option<f64>,
    pub coupling: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    /// Oscillator-major: all steps of oscillator 0, then oscillator 1, ...
    pub j: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub epsilon: Vec<f64>,
    pub points_per_axis: usize,
    pub half_width: Option<f64>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwinSlitConfig {
    pub mass: f64,
    pub spring: f64,
    pub omega0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma4: f64,
    pub j2: f64,
    pub j3: f64,
    pub j4: f64,
    pub k12: f64,
    pub k14: f64,
    #[serde(default)]
    pub k23: f64,
    #[serde(default)]
    pub k43: f64,
    /// Explicit `[k23, k43]` pairs.
    pub schedule: Option<Vec<[f64; 2]>>,
    /// Generate this many points sweeping the phase difference over 2π.
    pub sweep_points: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchrodingerConfig {
    pub exchange_mass: f64,
    pub interaction_time: f64,
    pub x12: f64,
    #[serde(default)]
    pub x23: f64,
    #[serde(default)]
    pub x43: f64,
    /// `[re, im]`.
    pub alpha: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub dt_list: Vec<f64>,
    pub test_function: TestFunctionConfig,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunctionConfig {
    SymmetricMode,
    AntisymmetricMode,
    Constant(f64),
    Polynomial(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub mass: f64,
    pub spring: f64,
    pub omega0: f64,
    pub impulse: ImpulseConfig,
    pub links: Vec<LinkConfig>,
    #[serde(default)]
    pub sentinel: bool,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ImpulseConfig {
    Explicit(f64),
    Proportional(f64),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub gamma: f64,
    pub k_im: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
}

fn missing(group: &str) -> CliError {
    CliError::Validation(format!("config: missing group \"{group}\""))
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        if !(cfg.hbar.is_finite() && cfg.hbar > 0.0) {
            return Err(ValidationError::new("hbar", "must be positive and finite").into());
        }
        Ok(cfg)
    }

    pub fn network(&self) -> Result<OscillatorNetwork, CliError> {
        let n = self.network.as_ref().ok_or_else(|| missing("network"))?;
        let net = match (&n.coupling, n.k12) {
            (Some(_), Some(_)) => {
                return Err(ValidationError::new(
                    "network.k12",
                    "give either k12 or coupling, not both",
                )
                .into())
            }
            (Some(c), None) => OscillatorNetwork::new(n.mass, n.spring, c.clone(), n.dt, n.steps)?,
            (None, Some(k12)) => OscillatorNetwork::pair(n.mass, n.spring, k12, n.dt, n.steps)?,
            (None, None) => OscillatorNetwork::single(n.mass, n.spring, n.dt, n.steps)?,
        };
        Ok(net)
    }

    /// The configured `J`, or zeros when there is no source group.
    pub fn source(&self, dim: usize) -> Result<Vec<f64>, CliError> {
        match &self.source {
            None => Ok(vec![0.0; dim]),
            Some(s) if s.j.len() != dim => Err(ValidationError::new(
                "source.j",
                format!(
                    "expected {dim} entries (sources × steps), got {}",
                    s.j.len()
                ),
            )
            .into()),
            Some(s) => {
                if s.j.iter().any(|v| !v.is_finite()) {
                    return Err(ValidationError::new("source.j", "must be finite").into());
                }
                Ok(s.j.clone())
            }
        }
    }

    pub fn quadrature(&self) -> Result<Vec<QuadratureSpec>, CliError> {
        let q = self
            .quadrature
            .as_ref()
            .ok_or_else(|| missing("quadrature"))?;
        if q.epsilon.is_empty() {
            return Err(ValidationError::new("quadrature.epsilon", "must not be empty").into());
        }
        q.epsilon
            .iter()
            .map(|&eps| {
                let base = QuadratureSpec::for_epsilon(eps, q.points_per_axis)?;
                Ok(QuadratureSpec::new(
                    q.half_width.unwrap_or(base.half_width),
                    q.points_per_axis,
                    eps,
                    q.tolerance.unwrap_or(base.tolerance),
                )?)
            })
            .collect()
    }

    pub fn twinslit(&self) -> Result<(TwinSlitScenario, &TwinSlitConfig), CliError> {
        let t = self.twinslit.as_ref().ok_or_else(|| missing("twinslit"))?;
        let sc = TwinSlitScenario {
            dynamics: SourceDynamics::new(t.mass, t.spring, t.omega0)?,
            gamma1: t.gamma1,
            gamma2: t.gamma2,
            gamma4: t.gamma4,
            j2: t.j2,
            j3: t.j3,
            j4: t.j4,
            k12: t.k12,
            k14: t.k14,
            k23: t.k23,
            k43: t.k43,
            hbar: self.hbar,
        };
        sc.validate()?;
        Ok((sc, t))
    }

    pub fn schrodinger(&self) -> Result<SchrodingerSide, CliError> {
        let s = self
            .schrodinger
            .as_ref()
            .ok_or_else(|| missing("schrodinger"))?;
        let [re, im] = s.alpha.unwrap_or([1.0, 0.0]);
        let side = SchrodingerSide {
            exchange_mass: s.exchange_mass,
            interaction_time: s.interaction_time,
            x12: s.x12,
            x23: s.x23,
            x43: s.x43,
            alpha: Complex64::new(re, im),
        };
        side.validate()?;
        Ok(side)
    }

    pub fn converge(&self) -> Result<(Vec<f64>, TestFunction), CliError> {
        let c = self.converge.as_ref().ok_or_else(|| missing("converge"))?;
        if c.dt_list.len() < 3 {
            return Err(ValidationError::new(
                "converge.dt_list",
                format!("need at least 3 entries, got {}", c.dt_list.len()),
            )
            .into());
        }
        let f = match &c.test_function {
            TestFunctionConfig::SymmetricMode => TestFunction::SymmetricMode,
            TestFunctionConfig::AntisymmetricMode => TestFunction::AntisymmetricMode,
            TestFunctionConfig::Constant(v) => TestFunction::Constant(*v),
            TestFunctionConfig::Polynomial(p) => TestFunction::Polynomial(p.clone()),
        };
        Ok((c.dt_list.clone(), f))
    }

    pub fn metric(&self) -> Result<(&MetricConfig, SourceDynamics, ImpulseModel), CliError> {
        let m = self.metric.as_ref().ok_or_else(|| missing("metric"))?;
        let dynamics = SourceDynamics::new(m.mass, m.spring, m.omega0)?;
        let impulse = match m.impulse {
            ImpulseConfig::Explicit(j) => ImpulseModel::Explicit(j),
            ImpulseConfig::Proportional(c) => ImpulseModel::ProportionalToMomentum(c),
        };
        Ok((m, dynamics, impulse))
    }
}
