//! Subsystem-based control cascade.
//!
//! Stage `k` solves
//!
//! ```text
//! g_k x_(k+1)d = Y_k theta_hat_k + delta_(k-1) g_(k-1) e_(k-1) + lambda_k e_k
//! ```
//!
//! for `x_(k+1)d` (with `x_(n+1)d = u`), where `Y_k = [x_kd', -gamma_k2, ..]`.
//! Everything is carried as jets of order `n - k` so that `x_(k+1)d'` is exact
//! for the next stage. Adapted estimates follow the projection law driven by
//! `p_k = e_k Y_k^T`.

use log::trace;
use thiserror::Error;

use crate::expr::JetEnv;
use crate::jet::Jet;
use crate::plant::{DerivativeProvider, PlantError, PlantOracle, SffModel};
use crate::projection::{ProjectionConfig, ProjectionError};
use crate::Scalar;

/// Smallest admissible `|g_k|` along the cascade.
pub const GAIN_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControllerError {
    #[error("invalid controller config: {0}")]
    Config(String),
    #[error("subsystem {k}: input gain {value} is too close to zero")]
    GainNearZero { k: usize, value: String },
    #[error("subsystem {k}: non-finite control signal")]
    NonFinite { k: usize },
    #[error("reference jet has order {got}, the cascade needs {needed}")]
    Reference { needed: usize, got: usize },
    #[error("estimate vector has {got} entries, expected {expected}")]
    Estimates { expected: usize, got: usize },
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Model-based feedforward with fixed parameters.
    Fixed,
    /// Parameters listed in `adapt` are estimated on line.
    Adaptive,
}

/// One estimated parameter `theta_k,zeta` (both indices 1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptedParam<T> {
    pub subsystem: usize,
    pub index: usize,
    pub projection: ProjectionConfig<T>,
    pub initial: T,
    /// A disabled entry stays frozen at `initial`.
    pub enabled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig<T> {
    /// `lambda_1..lambda_n`
    pub lambda: Vec<T>,
    /// `delta_1..delta_(n-1)`
    pub delta: Vec<T>,
    pub mode: Mode,
    /// Parameter values used by the feedforward for everything not adapted.
    pub fixed_theta: Vec<Vec<T>>,
    pub adapt: Vec<AdaptedParam<T>>,
}

impl<T: Scalar> ControllerConfig<T> {
    /// Gains and adaptation settings of the third-order benchmark. `fixed`
    /// holds `theta_12, theta_22` (used as initial estimates when adaptive).
    pub fn validation(mode: Mode, theta12: T, theta22: T) -> Self {
        let l = T::lit;
        let proj = |rho: f64, sigma: f64| ProjectionConfig::new(l(rho), l(sigma), l(1.0), l(9.0), l(0.5)).expect("valid");
        let adapt = match mode {
            Mode::Fixed => vec![],
            Mode::Adaptive => vec![
                AdaptedParam { subsystem: 1, index: 2, projection: proj(1000.0, 1.0), initial: theta12, enabled: true },
                AdaptedParam { subsystem: 2, index: 2, projection: proj(2.0, 500.0), initial: theta22, enabled: true },
            ],
        };
        ControllerConfig {
            lambda: vec![l(10.0), l(20.0), l(40.0)],
            delta: vec![l(10.0), l(20.0)],
            mode,
            fixed_theta: vec![vec![T::one(), theta12], vec![T::one(), theta22], vec![T::one()]],
            adapt,
        }
    }

    fn validate(&self, model: &SffModel<T>) -> Result<(), ControllerError> {
        let n = model.n();
        let bad = |m: String| Err(ControllerError::Config(m));
        if self.lambda.len() != n {
            return bad(format!("need {n} lambda gains, got {}", self.lambda.len()));
        }
        if self.delta.len() != n - 1 {
            return bad(format!("need {} delta gains, got {}", n - 1, self.delta.len()));
        }
        if let Some(v) = self.lambda.iter().chain(&self.delta).find(|v| !(**v > T::zero() && v.is_finite())) {
            return bad(format!("gains must be positive and finite, got {v}"));
        }
        if self.fixed_theta.len() != n {
            return bad(format!("need {n} fixed_theta vectors, got {}", self.fixed_theta.len()));
        }
        for (i, (th, ss)) in self.fixed_theta.iter().zip(model.subsystems()).enumerate() {
            if th.len() != ss.param_count() {
                return bad(format!("fixed_theta for subsystem {} has {} entries, expected {}", i + 1, th.len(), ss.param_count()));
            }
            if th.iter().any(|v| !v.is_finite()) {
                return bad(format!("fixed_theta for subsystem {} is not finite", i + 1));
            }
        }
        if self.mode == Mode::Adaptive {
            for (i, a) in self.adapt.iter().enumerate() {
                if a.subsystem == 0 || a.subsystem > n {
                    return bad(format!("adapted parameter refers to subsystem {} of {n}", a.subsystem));
                }
                let j = model.subsystem(a.subsystem).param_count();
                if a.index == 0 || a.index > j {
                    return bad(format!("subsystem {} has no parameter {}", a.subsystem, a.index));
                }
                if self.adapt[..i].iter().any(|b| (b.subsystem, b.index) == (a.subsystem, a.index)) {
                    return bad(format!("theta_{},{} is adapted twice", a.subsystem, a.index));
                }
                if !a.initial.is_finite() {
                    return bad(format!("initial estimate of theta_{},{} is not finite", a.subsystem, a.index));
                }
                a.projection.validate()?;
            }
        }
        Ok(())
    }
}

/// Everything one evaluation of the cascade produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerOutput<T> {
    pub u: T,
    /// `x_1d..x_nd`; `x_kd` carries `n - k + 1` derivatives.
    pub desired: Vec<Jet<T>>,
    /// `e_k = x_kd - x_k`
    pub e: Vec<T>,
    /// Stability connectors `s_1..s_(n-1)`.
    pub s: Vec<T>,
    /// Estimates in use, per subsystem.
    pub theta_hat: Vec<Vec<T>>,
    /// Rates of the enabled adapted parameters, in config order.
    pub theta_hat_dot: Vec<T>,
    /// Update drives `p` of the enabled adapted parameters.
    pub drive: Vec<T>,
    /// `Y_k` values.
    pub regressors: Vec<Vec<T>>,
    /// `g_k` values.
    pub gains: Vec<T>,
    /// Largest coefficient of any update-drive jet.
    pub max_drive_jet: T,
}

/// A validated model and controller configuration.
#[derive(Debug, Clone)]
pub struct Controller<T> {
    model: SffModel<T>,
    cfg: ControllerConfig<T>,
    /// Per subsystem: (parameter index, slot in the adapt list, slot among enabled).
    slots: Vec<Vec<(usize, usize, Option<usize>)>>,
    /// `Delta_k = 1 / (delta_1 .. delta_(k-1))`
    weights: Vec<T>,
}

impl<T: Scalar> Controller<T> {
    pub fn new(model: SffModel<T>, mut cfg: ControllerConfig<T>) -> Result<Self, ControllerError> {
        cfg.validate(&model)?;
        let n = model.n();
        let mut slots = vec![vec![]; n];
        if cfg.mode == Mode::Adaptive {
            let mut enabled = 0;
            for (i, a) in cfg.adapt.iter_mut().enumerate() {
                a.projection.smoothness_order = n - a.subsystem;
                let slot = if a.enabled {
                    enabled += 1;
                    Some(enabled - 1)
                } else {
                    None
                };
                slots[a.subsystem - 1].push((a.index, i, slot));
            }
        }
        let mut weights = vec![T::one()];
        for d in &cfg.delta {
            let last = *weights.last().expect("non-empty");
            weights.push(last / *d);
        }
        Ok(Controller { model, cfg, slots, weights })
    }

    pub fn model(&self) -> &SffModel<T> {
        &self.model
    }

    pub fn config(&self) -> &ControllerConfig<T> {
        &self.cfg
    }

    /// `Delta_1..Delta_n`.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Adapted parameters that are integrated, in the order of the estimate vector.
    pub fn enabled_params(&self) -> impl Iterator<Item = &AdaptedParam<T>> {
        let adaptive = self.cfg.mode == Mode::Adaptive;
        self.cfg.adapt.iter().filter(move |a| adaptive && a.enabled)
    }

    pub fn n_estimates(&self) -> usize {
        self.enabled_params().count()
    }

    pub fn initial_estimates(&self) -> Vec<T> {
        self.enabled_params().map(|a| a.initial).collect()
    }

    /// Full per-subsystem parameter vectors for the given estimate vector.
    pub fn theta_hat(&self, estimates: &[T]) -> Vec<Vec<T>> {
        let mut th = self.cfg.fixed_theta.clone();
        for (k, row) in self.slots.iter().enumerate() {
            for &(idx, i, slot) in row {
                th[k][idx - 1] = match slot {
                    Some(s) => estimates[s],
                    None => self.cfg.adapt[i].initial,
                };
            }
        }
        th
    }

    /// Runs the cascade with the plant oracle supplying state derivatives.
    pub fn step(&self, t: T, x: &[T], estimates: &[T], reference: &Jet<T>) -> Result<ControllerOutput<T>, ControllerError> {
        self.step_with(&PlantOracle, t, x, estimates, reference)
    }

    pub fn step_with(
        &self,
        provider: &dyn DerivativeProvider<T>,
        t: T,
        x: &[T],
        estimates: &[T],
        reference: &Jet<T>,
    ) -> Result<ControllerOutput<T>, ControllerError> {
        let n = self.model.n();
        if reference.order() < n {
            return Err(ControllerError::Reference { needed: n, got: reference.order() });
        }
        if estimates.len() != self.n_estimates() {
            return Err(ControllerError::Estimates { expected: self.n_estimates(), got: estimates.len() });
        }
        let xs = provider.state_jets(&self.model, t, x)?;
        let theta_hat = self.theta_hat(estimates);

        let mut desired = vec![reference.truncate(n)];
        let mut e = Vec::with_capacity(n);
        let mut regressors = Vec::with_capacity(n);
        let mut gains = Vec::with_capacity(n);
        let mut rates = vec![T::zero(); estimates.len()];
        let mut drives = vec![T::zero(); estimates.len()];
        let mut max_drive_jet = T::zero();
        // delta_(k-1) g_(k-1) e_(k-1), carried to the next stage
        let mut coupling: Option<Jet<T>> = None;

        for k in 1..=n {
            let m = n - k;
            let xkd = desired[k - 1];
            let x_dot_d = xkd.derivative().expect("x_kd has order >= 1");
            let prefix: Vec<Jet<T>> = xs[..k].iter().map(|j| j.truncate(m)).collect();
            let env = JetEnv { t: Jet::variable(t, m), x: &prefix };
            let ek = xkd.truncate(m) - prefix[k - 1];

            let mut y = Vec::with_capacity(self.model.subsystem(k).param_count());
            y.push(x_dot_d);
            for g in self.model.regressor_jets(k, env, m)? {
                y.push(-g);
            }
            let gk = self.model.gain_jet(k, env, m)?;

            let mut theta: Vec<Jet<T>> = theta_hat[k - 1].iter().map(|v| Jet::constant(*v, m)).collect();
            for &(idx, i, slot) in &self.slots[k - 1] {
                let Some(slot) = slot else { continue };
                let proj = &self.cfg.adapt[i].projection;
                let drive = ek * y[idx - 1];
                max_drive_jet = max_drive_jet.max(drive.max_abs());
                let mut th = theta[idx - 1];
                for level in 0..m {
                    let rate = proj.p_dot_jet(&drive.truncate(level), &th.truncate(level))?;
                    th.set_coeff(level + 1, rate.coeff(level));
                }
                theta[idx - 1] = th;
                drives[slot] = drive.value();
                rates[slot] = proj.p_dot(drive.value(), th.value());
            }

            let mut rhs = y[0] * theta[0];
            for (yz, tz) in y[1..].iter().zip(&theta[1..]) {
                rhs = rhs + *yz * *tz;
            }
            if let Some(c) = coupling {
                rhs = rhs + c.truncate(m);
            }
            rhs = rhs + ek.scale(self.cfg.lambda[k - 1]);

            let g0 = gk.value();
            if !(g0.abs() > T::lit(GAIN_EPS)) {
                return Err(ControllerError::GainNearZero { k, value: format!("{g0}") });
            }
            let next = rhs.checked_div(&gk).expect("orders match, gain nonzero");
            if !next.is_finite() {
                return Err(ControllerError::NonFinite { k });
            }
            if k < n {
                coupling = Some((gk * ek).scale(self.cfg.delta[k - 1]).truncate(m - 1));
            }
            e.push(ek.value());
            regressors.push(y.iter().map(Jet::value).collect());
            gains.push(g0);
            desired.push(next);
        }

        let u = desired.pop().expect("n + 1 entries").value();
        let s = (1..n).map(|k| self.weights[k - 1] * gains[k - 1] * e[k - 1] * e[k]).collect();
        trace!("t = {t}: u = {u}, e = {e:?}");
        Ok(ControllerOutput {
            u,
            desired,
            e,
            s,
            theta_hat,
            theta_hat_dot: rates,
            drive: drives,
            regressors,
            gains,
            max_drive_jet,
        })
    }

    /// State with `x_k = x_kd` for every `k`, i.e. zero tracking error.
    pub fn consistent_state(&self, t: T, estimates: &[T], reference: &Jet<T>) -> Result<Vec<T>, ControllerError> {
        let n = self.model.n();
        let mut x = vec![T::zero(); n];
        for k in 0..n {
            // x_kd only depends on x_1..x_(k-1)
            let out = self.step(t, &x, estimates, reference)?;
            x[k] = out.desired[k].value();
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{eval_jet, parse};
    use crate::plant::SubsystemSpec;

    fn reference(t: f64, order: usize) -> Jet<f64> {
        let e = parse("sin(2*pi*t)*tanh(t^3)").unwrap();
        eval_jet(&e, JetEnv { t: Jet::variable(t, order), x: &[] }, order).unwrap()
    }

    fn fixed() -> Controller<f64> {
        Controller::new(SffModel::validation(5.0, 5.0), ControllerConfig::validation(Mode::Fixed, 6.0, 4.0)).unwrap()
    }

    fn adaptive(t12: f64, t22: f64) -> Controller<f64> {
        Controller::new(SffModel::validation(5.0, 5.0), ControllerConfig::validation(Mode::Adaptive, t12, t22)).unwrap()
    }

    #[test]
    fn matches_symbolic_cascade() {
        // x2d, x3d, u at t = 0.4, x = (0.3, -0.2, 0.1), from symbolic differentiation
        let cases: [(Mode, [f64; 2], [f64; 3]); 4] = [
            (Mode::Fixed, [6.0, 4.0], [-2.8302273621265535, -60.38789381698243, -2688.957145454888]),
            (Mode::Adaptive, [6.5, 3.5], [-2.8437273621265535, -60.77543248951086, -2708.34308440171]),
            (Mode::Adaptive, [9.2, 0.8], [-2.9166273621265533, -61.649043432913324, -2739.902548742154]),
            (Mode::Adaptive, [9.7, 0.3], [-2.9301273621265533, -43.13127248951086, -20451.122052193274]),
        ];
        for (mode, th, want) in cases {
            let c = match mode {
                Mode::Fixed => fixed(),
                Mode::Adaptive => adaptive(6.0, 4.0),
            };
            let est: Vec<f64> = if mode == Mode::Fixed { vec![] } else { th.to_vec() };
            let out = c.step(0.4, &[0.3, -0.2, 0.1], &est, &reference(0.4, 3)).unwrap();
            let got = [out.desired[1].value(), out.desired[2].value(), out.u];
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() < 1e-12 * w.abs(), "{mode:?} {th:?}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn regressor_rows() {
        let c = fixed();
        let x = [0.3, -0.2, 0.1];
        let out = c.step(0.4, &x, &[], &reference(0.4, 3)).unwrap();
        assert_eq!(out.regressors[0].len(), 2);
        assert_eq!(out.regressors[0][1], -(0.3 * 0.3 * 0.3));
        assert_eq!(out.regressors[0][0], out.desired[0].coeff(1));
        assert_eq!(out.regressors[1][1], -(0.3 * 0.3 + 0.2 * 0.2));
        assert_eq!(out.regressors[2], vec![out.desired[2].coeff(1)]);
        assert_eq!(out.desired.iter().map(Jet::order).collect::<Vec<_>>(), vec![3, 2, 1]);
    }

    #[test]
    fn validation_laws_by_hand() {
        // x2d = Y1 th1 + l1 e1, x3d = Y2 th2 + l2 e2 + d1 e1, u = Y3 th3 + l3 e3 + d2 e2
        let c = fixed();
        let x = [0.3, -0.2, 0.1];
        let t = 0.4;
        let out = c.step(t, &x, &[], &reference(t, 3)).unwrap();
        let th = &out.theta_hat;
        let y = &out.regressors;
        let e = &out.e;
        let x2d = y[0][0] * th[0][0] + y[0][1] * th[0][1] + 10.0 * e[0];
        let x3d = y[1][0] * th[1][0] + y[1][1] * th[1][1] + 10.0 * e[0] + 20.0 * e[1];
        let u = y[2][0] * th[2][0] + 20.0 * e[1] + 40.0 * e[2];
        assert!((out.desired[1].value() - x2d).abs() < 1e-12);
        assert!((out.desired[2].value() - x3d).abs() < 1e-12);
        assert!((out.u - u).abs() < 1e-10 * u.abs().max(1.0));
        assert_eq!(e[0], reference(t, 0).value() - x[0]);
        assert_eq!(e[1], out.desired[1].value() - x[1]);
    }

    #[test]
    fn exact_feedforward_at_zero_error() {
        let c = Controller::new(
            SffModel::validation(5.0, 5.0),
            ControllerConfig::validation(Mode::Fixed, 5.0, 5.0),
        )
        .unwrap();
        let r = reference(0.7, 3);
        let x = c.consistent_state(0.7, &[], &r).unwrap();
        let out = c.step(0.7, &x, &[], &r).unwrap();
        assert!(out.e.iter().all(|v| v.abs() < 1e-14));
        assert!(out.s.iter().all(|v| v.abs() < 1e-20));
        assert!((out.u - out.regressors[2][0]).abs() < 1e-9);
    }

    #[test]
    fn connectors_follow_weights() {
        let c = fixed();
        let out = c.step(0.4, &[0.3, -0.2, 0.1], &[], &reference(0.4, 3)).unwrap();
        assert_eq!(c.weights(), &[1.0, 0.1, 0.1 / 20.0]);
        assert_eq!(out.s[0], out.e[0] * out.e[1]);
        assert_eq!(out.s[1], 0.1 * out.e[1] * out.e[2]);
    }

    #[test]
    fn adaptive_rates_and_drives() {
        let c = adaptive(6.0, 4.0);
        assert_eq!(c.initial_estimates(), vec![6.0, 4.0]);
        let x = [0.3, -0.2, 0.1];
        let out = c.step(0.4, &x, &[6.0, 4.0], &reference(0.4, 3)).unwrap();
        assert_eq!(out.drive[0], out.e[0] * out.regressors[0][1]);
        assert_eq!(out.drive[1], out.e[1] * out.regressors[1][1]);
        assert_eq!(out.theta_hat_dot[0], 1000.0 * out.drive[0]);
        assert_eq!(out.theta_hat_dot[1], 2.0 * out.drive[1]);
        // outside the bounds the correction pulls back
        let out = c.step(0.4, &x, &[9.7, 0.2], &reference(0.4, 3)).unwrap();
        assert!(out.theta_hat_dot[0] < 1000.0 * out.drive[0]);
        assert!(out.theta_hat_dot[1] > 2.0 * out.drive[1]);
    }

    #[test]
    fn estimate_jet_enters_downstream() {
        // with theta_hat_12 moving, x3d must see its derivative; compare with a
        // fixed controller sharing the current values
        let a = adaptive(6.0, 4.0);
        let f = fixed();
        let x = [0.3, -0.2, 0.1];
        let r = reference(0.4, 3);
        let oa = a.step(0.4, &x, &[6.0, 4.0], &r).unwrap();
        let of = f.step(0.4, &x, &[], &r).unwrap();
        assert_eq!(oa.desired[1].value(), of.desired[1].value());
        let dth = oa.theta_hat_dot[0];
        let want = of.desired[1].coeff(1) + oa.regressors[0][1] * dth;
        assert!((oa.desired[1].coeff(1) - want).abs() < 1e-9 * want.abs().max(1.0));
    }

    #[test]
    fn disabled_entries_are_frozen() {
        let mut cfg = ControllerConfig::validation(Mode::Adaptive, 6.0, 4.0);
        cfg.adapt[1].enabled = false;
        let c = Controller::new(SffModel::validation(5.0, 5.0), cfg).unwrap();
        assert_eq!(c.n_estimates(), 1);
        assert_eq!(c.theta_hat(&[7.0]), vec![vec![1.0, 7.0], vec![1.0, 4.0], vec![1.0]]);
    }

    #[test]
    fn appending_a_subsystem_keeps_prior_stages() {
        let base = SffModel::validation(5.0, 5.0);
        let ext = base
            .with_appended(SubsystemSpec::new(vec![1.0, 2.0], vec![parse("x1*x4").unwrap()], parse("1 + x2^2").unwrap()))
            .unwrap();
        let cfg = ControllerConfig::validation(Mode::Adaptive, 6.0, 4.0);
        let mut cfg4 = cfg.clone();
        cfg4.lambda.push(80.0);
        cfg4.delta.push(40.0);
        cfg4.fixed_theta.push(vec![1.0, 2.0]);
        let c3 = Controller::new(base, cfg).unwrap();
        let c4 = Controller::new(ext, cfg4).unwrap();
        let t = 0.4;
        let o3 = c3.step(t, &[0.3, -0.2, 0.1], &[6.5, 3.5], &reference(t, 3)).unwrap();
        let o4 = c4.step(t, &[0.3, -0.2, 0.1, 0.7], &[6.5, 3.5], &reference(t, 4)).unwrap();
        for k in 1..3 {
            let a = o3.desired[k].coeffs();
            let b = &o4.desired[k].coeffs()[..a.len()];
            assert_eq!(a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        }
        assert_eq!(o3.u.to_bits(), o4.desired[3].value().to_bits());
    }

    #[test]
    fn errors() {
        let c = fixed();
        assert!(matches!(
            c.step(0.0, &[0.0; 3], &[], &reference(0.0, 2)),
            Err(ControllerError::Reference { needed: 3, got: 2 })
        ));
        assert!(matches!(c.step(0.0, &[0.0; 3], &[1.0], &reference(0.0, 3)), Err(ControllerError::Estimates { .. })));
        let m = SffModel::new(vec![
            SubsystemSpec::new(vec![1.0], vec![], parse("x1").unwrap()),
            SubsystemSpec::integrator(),
        ])
        .unwrap();
        let cfg = ControllerConfig {
            lambda: vec![1.0, 1.0],
            delta: vec![1.0],
            mode: Mode::Fixed,
            fixed_theta: vec![vec![1.0], vec![1.0]],
            adapt: vec![],
        };
        let c = Controller::new(m, cfg.clone()).unwrap();
        assert!(matches!(
            c.step(0.0, &[0.0, 0.0], &[], &reference(0.0, 2)),
            Err(ControllerError::GainNearZero { k: 1, .. })
        ));
        let mut bad = cfg.clone();
        bad.lambda[0] = 0.0;
        assert!(Controller::new(SffModel::new(vec![SubsystemSpec::<f64>::integrator(); 2]).unwrap(), bad).is_err());
        let mut bad = ControllerConfig::validation(Mode::Adaptive, 6.0, 4.0);
        bad.adapt[1].subsystem = 1;
        assert!(Controller::new(SffModel::validation(5.0, 5.0), bad).is_err());
        let mut bad = ControllerConfig::validation(Mode::Adaptive, 6.0, 4.0);
        bad.adapt[0].index = 3;
        assert!(Controller::new(SffModel::validation(5.0, 5.0), bad).is_err());
    }
}
