//! JSON run specification.
//!
//! A spec mirrors the library types section by section; expressions are
//! strings in the expression grammar. Unknown keys are rejected.

use std::path::Path;

use sbc_core::controller::{AdaptedParam, Controller, ControllerConfig, Mode};
use sbc_core::expr::{parse, Expr};
use sbc_core::plant::{SffModel, SubsystemSpec};
use sbc_core::projection::ProjectionConfig;
use sbc_core::sim::{Integrator, SimConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub model: ModelSpec,
    pub controller: ControllerSpec,
    /// Desired trajectory `x_1d(t)`.
    pub trajectory: String,
    #[serde(default)]
    pub sim: SimSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub n: usize,
    pub subsystems: Vec<SubsystemEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsystemEntry {
    /// `theta_k1, theta_k2, ..`
    pub theta: Vec<f64>,
    /// `gamma_k2, ..`
    #[serde(default)]
    pub regressors: Vec<String>,
    pub gain: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSpec {
    pub mode: ModeName,
    pub lambda: Vec<f64>,
    pub delta: Vec<f64>,
    /// Defaults to the model parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_theta: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub adapt: Vec<AdaptEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptEntry {
    pub subsystem: usize,
    pub param: usize,
    pub rho: f64,
    pub sigma: f64,
    pub lower: f64,
    pub upper: f64,
    pub activation_c: f64,
    pub initial: f64,
    #[serde(default = "yes")]
    pub enabled: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorName {
    Euler,
    Rk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSpec {
    pub dt: f64,
    pub duration: f64,
    pub integrator: IntegratorName,
    /// Defaults to rest.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    pub record_stride: usize,
}

impl Default for SimSpec {
    fn default() -> Self {
        SimSpec { dt: 1e-5, duration: 10.0, integrator: IntegratorName::Rk4, x0: None, record_stride: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: String,
    pub plots: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: "out".into(), plots: false }
    }
}

/// A spec turned into library objects, ready to simulate.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub controller: Controller<f64>,
    pub reference: Expr,
    pub sim: SimConfig<f64>,
}

impl RunSpec {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let value: Value = serde_json::from_str(text).map_err(|e| LabError::Config(format!("invalid JSON: {e}")))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self, LabError> {
        serde_json::from_value(value).map_err(|e| LabError::Config(format!("invalid run spec: {e}")))
    }

    pub fn load(path: &Path) -> Result<Value, LabError> {
        let text = std::fs::read_to_string(path).map_err(LabError::io(path))?;
        serde_json::from_str(&text).map_err(|e| LabError::Config(format!("{}: invalid JSON: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("specs always serialize")
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("specs always serialize")
    }

    /// The adaptation entry of `theta_k,zeta`, if any.
    pub fn adapt_entry(&self, k: usize, zeta: usize) -> Option<&AdaptEntry> {
        self.controller.adapt.iter().find(|a| a.subsystem == k && a.param == zeta)
    }

    /// Parses every expression and validates all library invariants.
    pub fn prepare(&self) -> Result<Prepared, LabError> {
        let cfg = |m: String| LabError::Config(m);
        let n = self.model.n;
        if self.model.subsystems.len() != n {
            return Err(cfg(format!("model.n = {n} but {} subsystems are listed", self.model.subsystems.len())));
        }
        let mut subsystems = Vec::with_capacity(n);
        for (i, ss) in self.model.subsystems.iter().enumerate() {
            let regressors = ss
                .regressors
                .iter()
                .enumerate()
                .map(|(j, r)| expression(r, &format!("model.subsystems[{i}].regressors[{j}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let gain = expression(&ss.gain, &format!("model.subsystems[{i}].gain"))?;
            subsystems.push(SubsystemSpec::new(ss.theta.clone(), regressors, gain));
        }
        let model = SffModel::new(subsystems).map_err(|e| cfg(format!("model: {e}")))?;

        let c = &self.controller;
        let fixed_theta = c.fixed_theta.clone().unwrap_or_else(|| self.model.subsystems.iter().map(|s| s.theta.clone()).collect());
        let adapt = c
            .adapt
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let projection = ProjectionConfig::new(a.rho, a.sigma, a.lower, a.upper, a.activation_c)
                    .map_err(|e| cfg(format!("controller.adapt[{i}]: {e}")))?;
                Ok(AdaptedParam { subsystem: a.subsystem, index: a.param, projection, initial: a.initial, enabled: a.enabled })
            })
            .collect::<Result<Vec<_>, LabError>>()?;
        let mode = match c.mode {
            ModeName::Fixed => Mode::Fixed,
            ModeName::Adaptive => Mode::Adaptive,
        };
        let ccfg = ControllerConfig { lambda: c.lambda.clone(), delta: c.delta.clone(), mode, fixed_theta, adapt };
        let controller = Controller::new(model, ccfg).map_err(|e| cfg(format!("controller: {e}")))?;

        let reference = expression(&self.trajectory, "trajectory")?;
        if reference.max_state_index() > 0 {
            return Err(cfg("trajectory: may only depend on t".into()));
        }

        let s = &self.sim;
        let sim = SimConfig {
            dt: s.dt,
            duration: s.duration,
            integrator: match s.integrator {
                IntegratorName::Euler => Integrator::Euler,
                IntegratorName::Rk4 => Integrator::Rk4,
            },
            x0: s.x0.clone().unwrap_or_else(|| vec![0.0; n]),
            record_stride: s.record_stride,
        };
        if !(sim.dt > 0.0 && sim.dt.is_finite() && sim.duration >= 0.0 && sim.duration.is_finite()) {
            return Err(cfg(format!("sim: dt = {} and duration = {} must be positive and finite", sim.dt, sim.duration)));
        }
        if sim.x0.len() != n || sim.x0.iter().any(|v| !v.is_finite()) {
            return Err(cfg(format!("sim.x0 must hold {n} finite values")));
        }
        if sim.record_stride == 0 {
            return Err(cfg("sim.record_stride must be at least 1".into()));
        }
        Ok(Prepared { controller, reference, sim })
    }
}

fn expression(text: &str, at: &str) -> Result<Expr, LabError> {
    parse(text).map_err(|e| LabError::Config(format!("{at}: {e} in `{text}`")))
}

/// Sets `key` (dot separated, array indices as numbers) to `raw`, read as
/// JSON when it parses and as a string otherwise.
pub fn apply_override(doc: &mut Value, key: &str, raw: &str) -> Result<(), LabError> {
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let bad = |m: &str| LabError::Config(format!("--set {key}: {m}"));
    if key.is_empty() {
        return Err(bad("empty key"));
    }
    let mut node = doc;
    for part in key.split('.') {
        node = match node {
            Value::Object(map) => map.entry(part.to_string()).or_insert(Value::Null),
            Value::Array(items) => {
                let i: usize = part.parse().map_err(|_| bad("expected an array index"))?;
                let len = items.len();
                items.get_mut(i).ok_or_else(|| bad(&format!("index {i} out of range ({len} entries)")))?
            }
            Value::Null => {
                *node = Value::Object(Default::default());
                node.as_object_mut().expect("just set").entry(part.to_string()).or_insert(Value::Null)
            }
            _ => return Err(bad("path goes through a scalar")),
        };
    }
    *node = value;
    Ok(())
}

/// Parses `key=value`.
pub fn split_assignment(s: &str) -> Result<(&str, &str), LabError> {
    s.split_once('=').ok_or_else(|| LabError::Config(format!("--set expects key=value, got `{s}`")))
}
