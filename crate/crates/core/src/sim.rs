//! Fixed-step integration of plant states and parameter estimates.

use log::{debug, info};
use thiserror::Error;

use crate::analysis::{increases, lyapunov, LyapunovSnapshot};
use crate::controller::{Controller, ControllerError, ControllerOutput};
use crate::expr::{eval_jet, EvalError, Expr, JetEnv};
use crate::jet::Jet;
use crate::plant::PlantError;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("reference trajectory at t = {t}: {source}")]
    Reference { t: String, source: EvalError },
    #[error("controller at t = {t}: {source}")]
    Controller { t: String, source: ControllerError },
    #[error("plant at t = {t}: {source}")]
    Plant { t: String, source: PlantError },
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: String },
}

impl SimError {
    /// True for aborts caused by the numerics rather than the configuration.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, SimError::Config(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Euler,
    Rk4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    pub dt: T,
    pub duration: T,
    pub integrator: Integrator,
    pub x0: Vec<T>,
    /// Record every `record_stride`-th step (the last step is always recorded).
    pub record_stride: usize,
}

impl<T: Scalar> SimConfig<T> {
    /// `dt = 1e-5`, RK4, 10 s from rest, recorded at 1 kHz.
    pub fn validation() -> Self {
        SimConfig { dt: T::lit(1e-5), duration: T::lit(10.0), integrator: Integrator::Rk4, x0: vec![T::zero(); 3], record_stride: 100 }
    }

    /// Number of integration steps, `round(duration / dt)`.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round().to_usize().unwrap_or(0)
    }

    fn validate(&self, n: usize) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Config(m));
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.duration >= T::zero() && self.duration.is_finite()) {
            return bad(format!("duration = {} must be non-negative", self.duration));
        }
        if self.x0.len() != n {
            return bad(format!("x0 has {} entries, model order is {n}", self.x0.len()));
        }
        if self.x0.iter().any(|v| !v.is_finite()) {
            return bad("x0 must be finite".into());
        }
        if self.record_stride == 0 {
            return bad("record_stride must be at least 1".into());
        }
        Ok(())
    }
}

/// One recorded sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow<T> {
    pub t: T,
    pub x: Vec<T>,
    /// `x_1d..x_nd` values.
    pub xd: Vec<T>,
    pub e: Vec<T>,
    pub u: T,
    /// Enabled estimates, labelled by [`Trace::estimate_labels`].
    pub estimates: Vec<T>,
    pub s: Vec<T>,
    pub lyapunov: LyapunovSnapshot<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    pub n: usize,
    /// `(k, zeta)` of each recorded estimate.
    pub estimate_labels: Vec<(usize, usize)>,
    pub rows: Vec<TraceRow<T>>,
    pub dt: T,
    pub stride: usize,
    /// Largest update-drive jet coefficient seen during the run.
    pub max_drive_jet: T,
    /// Integration steps over which `nu_tot` increased (see
    /// [`crate::analysis::increases`]), checked at every step, not just recorded rows.
    pub step_violations: usize,
}

/// Reference of the third-order benchmark: a sine that fades in through
/// `tanh(t^3)` and out again after `t = 5`.
pub const VALIDATION_REFERENCE: &str =
    "piecewise(t <= 5: sin(2*pi*t) * tanh(t^3), t > 5: sin(2*pi*t) * tanh(t^3) * (1 - tanh((t - 5)^3)))";

/// Jet of the reference `x_1d` at `t`; the expression may only use `t`.
pub fn reference_jet<T: Scalar>(reference: &Expr, t: T, order: usize) -> Result<Jet<T>, EvalError> {
    eval_jet(reference, JetEnv { t: Jet::variable(t, order), x: &[] }, order)
}

struct Stepper<'a, T> {
    ctrl: &'a Controller<T>,
    reference: &'a Expr,
    n: usize,
    max_drive_jet: T,
}

impl<'a, T: Scalar> Stepper<'a, T> {
    fn output(&mut self, t: T, y: &[T]) -> Result<ControllerOutput<T>, SimError> {
        let r = reference_jet(self.reference, t, self.n)
            .map_err(|source| SimError::Reference { t: format!("{t}"), source })?;
        let out = self
            .ctrl
            .step(t, &y[..self.n], &y[self.n..], &r)
            .map_err(|source| SimError::Controller { t: format!("{t}"), source })?;
        self.max_drive_jet = self.max_drive_jet.max(out.max_drive_jet);
        Ok(out)
    }

    fn derivative(&self, t: T, y: &[T], out: &ControllerOutput<T>) -> Result<Vec<T>, SimError> {
        let mut dy = self
            .ctrl
            .model()
            .rhs(t, &y[..self.n], out.u)
            .map_err(|source| SimError::Plant { t: format!("{t}"), source })?;
        dy.extend_from_slice(&out.theta_hat_dot);
        Ok(dy)
    }

    fn field(&mut self, t: T, y: &[T]) -> Result<Vec<T>, SimError> {
        let out = self.output(t, y)?;
        self.derivative(t, y, &out)
    }

    fn row(&self, t: T, y: &[T], out: &ControllerOutput<T>, lyapunov: LyapunovSnapshot<T>) -> TraceRow<T> {
        TraceRow {
            t,
            x: y[..self.n].to_vec(),
            xd: out.desired.iter().map(Jet::value).collect(),
            e: out.e.clone(),
            u: out.u,
            estimates: y[self.n..].to_vec(),
            s: out.s.clone(),
            lyapunov,
        }
    }
}

fn axpy<T: Scalar>(y: &[T], h: T, k: &[T]) -> Vec<T> {
    y.iter().zip(k).map(|(a, b)| *a + h * *b).collect()
}

/// Integrates the closed loop from `cfg.x0` and the configured initial estimates.
pub fn simulate<T: Scalar>(ctrl: &Controller<T>, reference: &Expr, cfg: &SimConfig<T>) -> Result<Trace<T>, SimError> {
    let n = ctrl.model().n();
    cfg.validate(n)?;
    let i = reference.max_state_index();
    if i > 0 {
        return Err(SimError::Config(format!("the reference may only depend on t, found x{i}")));
    }
    let steps = cfg.steps();
    let dt = cfg.dt;
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let mut st = Stepper { ctrl, reference, n, max_drive_jet: T::zero() };
    let mut y: Vec<T> = cfg.x0.iter().copied().chain(ctrl.initial_estimates()).collect();
    let mut rows = Vec::with_capacity(steps / cfg.record_stride + 2);
    let mut prev: Option<LyapunovSnapshot<T>> = None;
    let mut step_violations = 0;
    info!("simulating {steps} steps of {dt} with {:?}", cfg.integrator);

    for i in 0..=steps {
        let t = T::from_usize(i).expect("step index") * dt;
        let out = st.output(t, &y)?;
        let snap = lyapunov(ctrl, &out.e, &out.theta_hat);
        if prev.as_ref().is_some_and(|p| increases(p, &snap, dt)) {
            step_violations += 1;
        }
        if i % cfg.record_stride == 0 || i == steps {
            rows.push(st.row(t, &y, &out, snap.clone()));
        }
        prev = Some(snap);
        if i == steps {
            break;
        }
        let k1 = st.derivative(t, &y, &out)?;
        y = match cfg.integrator {
            Integrator::Euler => axpy(&y, dt, &k1),
            Integrator::Rk4 => {
                let k2 = st.field(t + half * dt, &axpy(&y, half * dt, &k1))?;
                let k3 = st.field(t + half * dt, &axpy(&y, half * dt, &k2))?;
                let k4 = st.field(t + dt, &axpy(&y, dt, &k3))?;
                (0..y.len())
                    .map(|j| y[j] + dt * sixth * (k1[j] + (k2[j] + k3[j]) * T::lit(2.0) + k4[j]))
                    .collect()
            }
        };
        if y.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFinite { t: format!("{}", t + dt) });
        }
    }
    debug!("largest update-drive jet coefficient: {}", st.max_drive_jet);
    Ok(Trace {
        n,
        estimate_labels: ctrl.enabled_params().map(|a| (a.subsystem, a.index)).collect(),
        rows,
        dt,
        stride: cfg.record_stride,
        max_drive_jet: st.max_drive_jet,
        step_violations,
    })
}
