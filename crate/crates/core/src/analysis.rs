//! Lyapunov bookkeeping, stability-connector checks and run metrics.
//!
//! With `D_k = delta_1 .. delta_(k-1)` the subsystem functions are
//!
//! ```text
//! nu_k = 1/(2 D_k) (theta_k1 e_k^2 + sum_zeta (theta_k,zeta - theta_hat_k,zeta)^2 / rho_k,zeta)
//! ```
//!
//! and along solutions `nu_k' <= -(lambda_k / D_k) e_k^2 - s_(k-1) + s_k`, so
//! the connectors cancel in the sum and `nu_tot' <= -e^T B e`.
//! Parameters that are not adapted enter with `rho = 1`.

use crate::controller::{Controller, ControllerError, Mode};
use crate::expr::Expr;
use crate::sim::{reference_jet, Trace};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSnapshot<T> {
    pub nu: Vec<T>,
    pub nu_tot: T,
    /// `e^T A e` with `A = diag(theta_k1 / D_k)`.
    pub e_a_e: T,
    /// `e^T B e` with `B = diag(lambda_k / D_k)`.
    pub e_b_e: T,
}

/// `rho` used for `theta_k,zeta` in the Lyapunov function.
fn rho_of<T: Scalar>(ctrl: &Controller<T>, k: usize, zeta: usize) -> T {
    let cfg = ctrl.config();
    if cfg.mode == Mode::Adaptive {
        if let Some(a) = cfg.adapt.iter().find(|a| a.subsystem == k && a.index == zeta) {
            return a.projection.rho;
        }
    }
    T::one()
}

pub fn lyapunov<T: Scalar>(ctrl: &Controller<T>, e: &[T], theta_hat: &[Vec<T>]) -> LyapunovSnapshot<T> {
    let model = ctrl.model();
    let half = T::lit(0.5);
    let mut nu = Vec::with_capacity(e.len());
    let (mut e_a_e, mut e_b_e) = (T::zero(), T::zero());
    for (i, ek) in e.iter().enumerate() {
        let k = i + 1;
        let w = ctrl.weights()[i];
        let theta = &model.subsystem(k).theta;
        let mut params = T::zero();
        for (z, (th, est)) in theta.iter().zip(&theta_hat[i]).enumerate() {
            let d = *th - *est;
            params = params + d * d / rho_of(ctrl, k, z + 1);
        }
        let quad = theta[0] * *ek * *ek;
        nu.push(half * w * (quad + params));
        e_a_e = e_a_e + w * quad;
        e_b_e = e_b_e + w * ctrl.config().lambda[i] * *ek * *ek;
    }
    let nu_tot = nu.iter().fold(T::zero(), |a, b| a + *b);
    LyapunovSnapshot { nu, nu_tot, e_a_e, e_b_e }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics<T> {
    pub max_abs_e: Vec<T>,
    pub final_abs_e: Vec<T>,
    /// `((k, zeta), value)` of every recorded estimate at the end of the run.
    pub theta_hat_terminal: Vec<((usize, usize), T)>,
}

pub fn metrics<T: Scalar>(trace: &Trace<T>) -> RunMetrics<T> {
    let mut max_abs_e = vec![T::zero(); trace.n];
    for r in &trace.rows {
        for (m, e) in max_abs_e.iter_mut().zip(&r.e) {
            *m = m.max(e.abs());
        }
    }
    let last = trace.rows.last();
    let final_abs_e = last.map_or_else(|| vec![T::zero(); trace.n], |r| r.e.iter().map(|e| e.abs()).collect());
    let theta_hat_terminal = last
        .map(|r| trace.estimate_labels.iter().copied().zip(r.estimates.iter().copied()).collect())
        .unwrap_or_default();
    RunMetrics { max_abs_e, final_abs_e, theta_hat_terminal }
}

/// Whether `nu_tot` grows faster than `1e-4 max(1, e^T B e)` between two samples `h` apart.
pub fn increases<T: Scalar>(a: &LyapunovSnapshot<T>, b: &LyapunovSnapshot<T>, h: T) -> bool {
    let rate = (b.nu_tot - a.nu_tot) / h;
    rate > T::lit(1e-4) * T::one().max(a.e_b_e.max(b.e_b_e))
}

/// Indices `i` of recorded rows where `nu_tot` increases towards row `i + 1`.
pub fn monotonicity_report<T: Scalar>(trace: &Trace<T>) -> Vec<usize> {
    trace
        .rows
        .windows(2)
        .enumerate()
        .filter(|(_, w)| increases(&w[0].lyapunov, &w[1].lyapunov, w[1].t - w[0].t))
        .map(|(i, _)| i)
        .collect()
}

/// Largest normalized residual of a check and where it occurred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual<T> {
    pub worst: T,
    pub t: T,
    /// Subsystem index (0 when the check is not per subsystem).
    pub k: usize,
    pub samples: usize,
}

impl<T: Scalar> Residual<T> {
    fn new() -> Self {
        Residual { worst: T::zero(), t: T::zero(), k: 0, samples: 0 }
    }

    fn record(&mut self, value: T, t: T, k: usize) {
        self.samples += 1;
        if value > self.worst || value.is_nan() {
            self.worst = value;
            self.t = t;
            self.k = k;
        }
    }
}

/// Interior sample indices whose central-difference stencil stays clear of
/// the reference breakpoints.
fn stencil_points<'a, T: Scalar>(trace: &'a Trace<T>, reference: &Expr) -> impl Iterator<Item = usize> + 'a {
    let breaks: Vec<T> = reference.breakpoints().into_iter().map(T::lit).collect();
    let rows = &trace.rows;
    (1..rows.len().saturating_sub(1)).filter(move |&i| {
        let (lo, hi) = (rows[i - 1].t, rows[i + 1].t);
        let uniform = ((hi - rows[i].t) - (rows[i].t - lo)).abs() <= T::lit(1e-9) * (hi - lo);
        uniform && !breaks.iter().any(|b| *b >= lo && *b <= hi)
    })
}

fn central<T: Scalar>(before: T, after: T, t0: T, t1: T) -> T {
    (after - before) / (t1 - t0)
}

/// Compares `theta_k1 e_k'` (central difference of the trace) with
/// `-lambda_k e_k - delta_(k-1) g_(k-1) e_(k-1) + g_k e_(k+1) + Y_k (theta_k - theta_hat_k)`.
/// The residual is `|lhs - rhs| / max(1, |rhs|)`.
pub fn error_dynamics_residual<T: Scalar>(
    ctrl: &Controller<T>,
    reference: &Expr,
    trace: &Trace<T>,
) -> Result<Residual<T>, ControllerError> {
    let n = trace.n;
    let model = ctrl.model();
    let cfg = ctrl.config();
    let mut res = Residual::new();
    for i in stencil_points(trace, reference) {
        let (prev, row, next) = (&trace.rows[i - 1], &trace.rows[i], &trace.rows[i + 1]);
        let r = reference_jet(reference, row.t, n).expect("reference evaluated during the run");
        let out = ctrl.step(row.t, &row.x, &row.estimates, &r)?;
        for k in 1..=n {
            let theta = &model.subsystem(k).theta;
            let lhs = theta[0] * central(prev.e[k - 1], next.e[k - 1], prev.t, next.t);
            let mut rhs = -cfg.lambda[k - 1] * out.e[k - 1];
            if k > 1 {
                rhs = rhs - cfg.delta[k - 2] * out.gains[k - 2] * out.e[k - 2];
            }
            if k < n {
                rhs = rhs + out.gains[k - 1] * out.e[k];
            }
            for ((y, th), est) in out.regressors[k - 1].iter().zip(theta).zip(&out.theta_hat[k - 1]) {
                rhs = rhs + *y * (*th - *est);
            }
            res.record((lhs - rhs).abs() / T::one().max(rhs.abs()), row.t, k);
        }
    }
    Ok(res)
}

/// Checks `nu_k' <= -(lambda_k / D_k) e_k^2 - s_(k-1) + s_k` with `nu_k'` from
/// central differences; the residual is `(nu_k' - bound) / max(1, |nu_k'|)`.
pub fn virtual_stability_residual<T: Scalar>(ctrl: &Controller<T>, reference: &Expr, trace: &Trace<T>) -> Residual<T> {
    let n = trace.n;
    let mut res = Residual::new();
    for i in stencil_points(trace, reference) {
        let (prev, row, next) = (&trace.rows[i - 1], &trace.rows[i], &trace.rows[i + 1]);
        for k in 1..=n {
            let rate = central(prev.lyapunov.nu[k - 1], next.lyapunov.nu[k - 1], prev.t, next.t);
            let beta = ctrl.config().lambda[k - 1] * ctrl.weights()[k - 1];
            let mut bound = -beta * row.e[k - 1] * row.e[k - 1];
            if k > 1 {
                bound = bound - row.s[k - 2];
            }
            if k < n {
                bound = bound + row.s[k - 1];
            }
            res.record((rate - bound) / T::one().max(rate.abs()), row.t, k);
        }
    }
    res
}

/// `|nu_tot' + e^T B e| / max(1, e^T B e)` over samples whose estimates all
/// lie strictly inside their projection bounds.
pub fn telescoping_residual<T: Scalar>(ctrl: &Controller<T>, reference: &Expr, trace: &Trace<T>) -> Residual<T> {
    let bounds: Vec<(T, T)> = ctrl.enabled_params().map(|a| (a.projection.lower, a.projection.upper)).collect();
    let mut res = Residual::new();
    for i in stencil_points(trace, reference) {
        let (prev, row, next) = (&trace.rows[i - 1], &trace.rows[i], &trace.rows[i + 1]);
        let inside = [prev, row, next]
            .iter()
            .all(|r| r.estimates.iter().zip(&bounds).all(|(v, (a, b))| *v > *a && *v < *b));
        if !inside {
            continue;
        }
        let rate = central(prev.lyapunov.nu_tot, next.lyapunov.nu_tot, prev.t, next.t);
        let ebe = row.lyapunov.e_b_e;
        res.record((rate + ebe).abs() / T::one().max(ebe), row.t, 0);
    }
    res
}
