//! Strict-feedback plant
//!
//! ```text
//! theta_k1 * x_k' = f_k(x_1..x_k) + g_k(x_1..x_k) * x_(k+1),   x_(n+1) = u
//! f_k = sum_(zeta >= 2) theta_k,zeta * gamma_k,zeta(x_1..x_k)
//! ```
//!
//! and the oracle that differentiates these equations through jet arithmetic
//! to supply `x_k', x_k'', ..` to the controller cascade.

use thiserror::Error;

use crate::expr::{eval_jet, BindError, EvalError, Expr, JetEnv};
use crate::jet::{Jet, MAX_ORDER};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlantError {
    #[error("a model needs at least one subsystem")]
    Empty,
    #[error("model order {n} exceeds the supported maximum {MAX_ORDER}")]
    TooLarge { n: usize },
    #[error("subsystem {k}: {theta} parameters but {regressors} regressors (need one more parameter than regressors)")]
    ParameterCount { k: usize, theta: usize, regressors: usize },
    #[error("subsystem {k}: theta_{k},{zeta} = {value} must be positive")]
    NonPositiveTheta { k: usize, zeta: usize, value: String },
    #[error("subsystem {k}: {source}")]
    Binding { k: usize, source: BindError },
    #[error("subsystem {k}: {source}")]
    Eval { k: usize, source: EvalError },
    #[error("subsystem {k}: non-finite derivative")]
    NonFinite { k: usize },
    #[error("state has {got} entries, model order is {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("jet order {order} not available (limit {limit})")]
    OrderOverflow { order: usize, limit: usize },
}

/// One subsystem `k`: parameters `theta_k1..theta_kj`, regressors
/// `gamma_k2..gamma_kj` and input gain `g_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemSpec<T> {
    pub theta: Vec<T>,
    pub regressors: Vec<Expr>,
    pub gain: Expr,
}

impl<T: Scalar> SubsystemSpec<T> {
    pub fn new(theta: Vec<T>, regressors: Vec<Expr>, gain: Expr) -> Self {
        SubsystemSpec { theta, regressors, gain }
    }

    /// Pure integrator `x_k' = x_(k+1)`.
    pub fn integrator() -> Self {
        SubsystemSpec { theta: vec![T::one()], regressors: vec![], gain: Expr::constant(1.0) }
    }

    /// Number of parameters `j`.
    pub fn param_count(&self) -> usize {
        self.theta.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SffModel<T> {
    subsystems: Vec<SubsystemSpec<T>>,
}

impl<T: Scalar> SffModel<T> {
    pub fn new(subsystems: Vec<SubsystemSpec<T>>) -> Result<Self, PlantError> {
        if subsystems.is_empty() {
            return Err(PlantError::Empty);
        }
        if subsystems.len() > MAX_ORDER {
            return Err(PlantError::TooLarge { n: subsystems.len() });
        }
        for (i, ss) in subsystems.iter().enumerate() {
            let k = i + 1;
            if ss.theta.len() != ss.regressors.len() + 1 {
                return Err(PlantError::ParameterCount { k, theta: ss.theta.len(), regressors: ss.regressors.len() });
            }
            if let Some((z, v)) = ss.theta.iter().enumerate().find(|(_, v)| !(**v > T::zero()) || !v.is_finite()) {
                return Err(PlantError::NonPositiveTheta { k, zeta: z + 1, value: format!("{v}") });
            }
            for e in ss.regressors.iter().chain(std::iter::once(&ss.gain)) {
                e.check_bound_to(k).map_err(|source| PlantError::Binding { k, source })?;
            }
        }
        Ok(SffModel { subsystems })
    }

    /// The third-order benchmark
    /// `x1' = a1 x1^3 + x2`, `x2' = a2 (x1^2 + x2^2) + x3`, `x3' = u`.
    pub fn validation(a1: T, a2: T) -> Self {
        let p = |s: &str| crate::expr::parse(s).expect("built-in expression");
        SffModel::new(vec![
            SubsystemSpec::new(vec![T::one(), a1], vec![p("x1^3")], p("1")),
            SubsystemSpec::new(vec![T::one(), a2], vec![p("x1^2 + x2^2")], p("1")),
            SubsystemSpec::integrator(),
        ])
        .expect("validation model is well formed")
    }

    /// Same model with one more subsystem appended; the old `u` becomes `x_(n+1)`.
    pub fn with_appended(&self, ss: SubsystemSpec<T>) -> Result<Self, PlantError> {
        let mut subsystems = self.subsystems.clone();
        subsystems.push(ss);
        SffModel::new(subsystems)
    }

    pub fn n(&self) -> usize {
        self.subsystems.len()
    }

    pub fn subsystems(&self) -> &[SubsystemSpec<T>] {
        &self.subsystems
    }

    /// Subsystem `k`, 1-based.
    pub fn subsystem(&self, k: usize) -> &SubsystemSpec<T> {
        &self.subsystems[k - 1]
    }

    fn check_state(&self, state: &[T]) -> Result<(), PlantError> {
        if state.len() != self.n() {
            return Err(PlantError::StateLength { expected: self.n(), got: state.len() });
        }
        Ok(())
    }

    fn eval_at(&self, k: usize, e: &Expr, env: JetEnv<'_, T>, order: usize) -> Result<Jet<T>, PlantError> {
        eval_jet(e, env, order).map_err(|source| PlantError::Eval { k, source })
    }

    /// Jets of `gamma_k2..gamma_kj` along `x` (at least `k` entries).
    pub fn regressor_jets(&self, k: usize, env: JetEnv<'_, T>, order: usize) -> Result<Vec<Jet<T>>, PlantError> {
        self.subsystem(k).regressors.iter().map(|g| self.eval_at(k, g, env, order)).collect()
    }

    pub fn gain_jet(&self, k: usize, env: JetEnv<'_, T>, order: usize) -> Result<Jet<T>, PlantError> {
        self.eval_at(k, &self.subsystem(k).gain, env, order)
    }

    /// `f_k = sum theta_k,zeta gamma_k,zeta` as a jet.
    pub fn f_jet(&self, k: usize, env: JetEnv<'_, T>, order: usize) -> Result<Jet<T>, PlantError> {
        let ss = self.subsystem(k);
        let mut acc: Option<Jet<T>> = None;
        for (theta, g) in ss.theta[1..].iter().zip(&ss.regressors) {
            let term = self.eval_at(k, g, env, order)?.scale(*theta);
            acc = Some(match acc {
                None => term,
                Some(a) => a + term,
            });
        }
        Ok(acc.unwrap_or_else(|| Jet::zero(order)))
    }

    /// `x_k'` as a jet: `(f_k + g_k x_(k+1)) / theta_k1`. `next` is `x_(k+1)`
    /// (or `u` for `k = n`).
    pub fn rhs_jet(&self, k: usize, env: JetEnv<'_, T>, next: &Jet<T>, order: usize) -> Result<Jet<T>, PlantError> {
        let f = self.f_jet(k, env, order)?;
        let g = self.gain_jet(k, env, order)?;
        let theta1 = self.subsystem(k).theta[0];
        let num = f + g * next.truncate(order);
        let mut out = Jet::zero(order);
        for (i, c) in num.coeffs().iter().enumerate() {
            out.set_coeff(i, *c / theta1);
        }
        if !out.is_finite() {
            return Err(PlantError::NonFinite { k });
        }
        Ok(out)
    }

    /// `f_k(x_1..x_k)` at time `t`.
    pub fn f(&self, k: usize, t: T, x: &[T]) -> Result<T, PlantError> {
        let jets: Vec<Jet<T>> = x.iter().map(|v| Jet::constant(*v, 0)).collect();
        Ok(self.f_jet(k, JetEnv { t: Jet::variable(t, 0), x: &jets }, 0)?.value())
    }

    pub fn gain(&self, k: usize, t: T, x: &[T]) -> Result<T, PlantError> {
        let jets: Vec<Jet<T>> = x.iter().map(|v| Jet::constant(*v, 0)).collect();
        Ok(self.gain_jet(k, JetEnv { t: Jet::variable(t, 0), x: &jets }, 0)?.value())
    }

    /// State derivative `x'` for input `u`. Shares its arithmetic with the
    /// order-0 step of [`SffModel::state_jets`].
    pub fn rhs(&self, t: T, state: &[T], u: T) -> Result<Vec<T>, PlantError> {
        self.check_state(state)?;
        let jets: Vec<Jet<T>> = state.iter().map(|v| Jet::constant(*v, 0)).collect();
        let env = JetEnv { t: Jet::variable(t, 0), x: &jets };
        let u = Jet::constant(u, 0);
        (1..=self.n())
            .map(|k| {
                let next = if k < self.n() { &jets[k] } else { &u };
                self.rhs_jet(k, env, next, 0).map(|j| j.value())
            })
            .collect()
    }

    /// Jets of `x_1..x_n` of order `order`, obtained by differentiating the
    /// plant equations. `u` must carry at least `order - 1` derivatives.
    pub fn state_jets(&self, t: T, state: &[T], u: &Jet<T>, order: usize) -> Result<Vec<Jet<T>>, PlantError> {
        self.check_state(state)?;
        if order > MAX_ORDER {
            return Err(PlantError::OrderOverflow { order, limit: MAX_ORDER });
        }
        if order > 0 && u.order() < order - 1 {
            return Err(PlantError::OrderOverflow { order, limit: u.order() + 1 });
        }
        self.propagate(t, state, Some(u), &vec![order; self.n()])
    }

    /// Jets of `x_1..x_n` where `x_k` has order `n - k`: every derivative
    /// that does not depend on `u`.
    pub fn graded_state_jets(&self, t: T, state: &[T]) -> Result<Vec<Jet<T>>, PlantError> {
        self.check_state(state)?;
        let n = self.n();
        let caps: Vec<usize> = (1..=n).map(|k| n - k).collect();
        self.propagate(t, state, None, &caps)
    }

    fn propagate(&self, t: T, state: &[T], u: Option<&Jet<T>>, caps: &[usize]) -> Result<Vec<Jet<T>>, PlantError> {
        let n = self.n();
        let top = caps.iter().copied().max().unwrap_or(0);
        let t_jet = Jet::variable(t, top);
        let mut jets: Vec<Jet<T>> = state.iter().zip(caps).map(|(v, c)| Jet::constant(*v, *c)).collect();
        for level in 0..top {
            for k in 1..=n {
                if caps[k - 1] <= level {
                    continue;
                }
                let prefix: Vec<Jet<T>> = jets[..k].iter().map(|j| j.truncate(level)).collect();
                let next = if k < n {
                    jets[k].truncate(level)
                } else {
                    u.expect("x_n is only differentiated when u is supplied").truncate(level)
                };
                let env = JetEnv { t: t_jet.truncate(level), x: &prefix };
                let d = self.rhs_jet(k, env, &next, level)?;
                jets[k - 1].set_coeff(level + 1, d.coeff(level));
            }
        }
        Ok(jets)
    }
}

/// Source of the state derivatives consumed by the controller cascade.
pub trait DerivativeProvider<T: Scalar> {
    /// Jets of `x_1..x_n` with `x_k` of order at least `n - k`.
    fn state_jets(&self, model: &SffModel<T>, t: T, state: &[T]) -> Result<Vec<Jet<T>>, PlantError>;
}

/// Differentiates the plant equations with the true parameters.
#[derive(Debug, Clone, Copy, Default)]
pub struct PlantOracle;

impl<T: Scalar> DerivativeProvider<T> for PlantOracle {
    fn state_jets(&self, model: &SffModel<T>, t: T, state: &[T]) -> Result<Vec<Jet<T>>, PlantError> {
        model.graded_state_jets(t, state)
    }
}
