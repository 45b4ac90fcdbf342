//! Smooth parameter projection.
//!
//! The estimate `P` evolves as `P' = rho (p + sigma kappa(P))`, where `kappa`
//! vanishes on `[a, b]`, pulls `P` back linearly outside `[a - c, b + c]` and
//! blends the two through the switching functions `S_a`, `S_b` in between.
//! Every boundary point belongs to a closed branch and all one-sided
//! derivatives agree there, so jets are exact at the boundaries too.

use thiserror::Error;

use crate::expr::Func;
use crate::jet::{Jet, MAX_ORDER};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("invalid projection config: {0}")]
    Config(String),
    #[error("{which}({p}) is only defined on the open switching zone ({lo}, {hi})")]
    Domain { which: &'static str, p: String, lo: String, hi: String },
    #[error("reference point {0} lies outside [lower, upper]")]
    Reference(String),
    #[error("jet order {order} exceeds smoothness order {smoothness}")]
    Order { order: usize, smoothness: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionConfig<T> {
    pub rho: T,
    pub sigma: T,
    /// `a`
    pub lower: T,
    /// `b`
    pub upper: T,
    /// `c`
    pub activation: T,
    /// Number of continuous derivatives the estimate must carry.
    pub smoothness_order: usize,
}

impl<T: Scalar> ProjectionConfig<T> {
    pub fn new(rho: T, sigma: T, lower: T, upper: T, activation: T) -> Result<Self, ProjectionError> {
        let cfg = ProjectionConfig { rho, sigma, lower, upper, activation, smoothness_order: MAX_ORDER };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_smoothness(mut self, order: usize) -> Self {
        self.smoothness_order = order;
        self
    }

    pub fn validate(&self) -> Result<(), ProjectionError> {
        let all = [self.rho, self.sigma, self.lower, self.upper, self.activation];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(ProjectionError::Config("parameters must be finite".into()));
        }
        if !(self.rho > T::zero() && self.sigma > T::zero()) {
            return Err(ProjectionError::Config(format!("rho = {} and sigma = {} must be positive", self.rho, self.sigma)));
        }
        let (a, b, c) = (self.lower, self.upper, self.activation);
        if !(c > T::zero() && b >= a && a - c > T::zero()) {
            return Err(ProjectionError::Config(format!(
                "need upper >= lower > lower - activation > 0 with activation > 0 (lower = {a}, upper = {b}, activation = {c})"
            )));
        }
        Ok(())
    }

    fn domain(&self, which: &'static str, p: T, lo: T, hi: T) -> ProjectionError {
        ProjectionError::Domain { which, p: format!("{p}"), lo: format!("{lo}"), hi: format!("{hi}") }
    }

    /// `S_a(P) = 1/2 [1 - tanh(1/(a-c-P) + 1/(a-P))]` on `(a - c, a)`.
    pub fn switch_a(&self, p: T) -> Result<T, ProjectionError> {
        Ok(self.switch_a_jet(&Jet::constant(p, 0))?.value())
    }

    /// `S_b(P) = 1/2 [1 + tanh(1/(b-P) + 1/(b+c-P))]` on `(b, b + c)`.
    pub fn switch_b(&self, p: T) -> Result<T, ProjectionError> {
        Ok(self.switch_b_jet(&Jet::constant(p, 0))?.value())
    }

    pub fn switch_a_jet(&self, p: &Jet<T>) -> Result<Jet<T>, ProjectionError> {
        let (lo, hi) = (self.lower - self.activation, self.lower);
        let v = p.value();
        if !(v > lo && v < hi) {
            return Err(self.domain("switch_a", v, lo, hi));
        }
        Ok(switch_jet(p, lo, hi, -T::one()))
    }

    pub fn switch_b_jet(&self, p: &Jet<T>) -> Result<Jet<T>, ProjectionError> {
        let (lo, hi) = (self.upper, self.upper + self.activation);
        let v = p.value();
        if !(v > lo && v < hi) {
            return Err(self.domain("switch_b", v, lo, hi));
        }
        Ok(switch_jet(p, lo, hi, T::one()))
    }

    /// The corrective term `kappa(P)`.
    pub fn kappa(&self, p: T) -> T {
        self.kappa_jet(&Jet::constant(p, 0)).value()
    }

    pub fn kappa_jet(&self, p: &Jet<T>) -> Jet<T> {
        let (a, b, c) = (self.lower, self.upper, self.activation);
        let v = p.value();
        if v >= b + c {
            -*p + Jet::constant(b, p.order())
        } else if v > b {
            let s = switch_jet(p, b, b + c, T::one());
            (-*p + Jet::constant(b, p.order())) * s
        } else if v >= a {
            Jet::zero(p.order())
        } else if v > a - c {
            let s = switch_jet(p, a - c, a, -T::one());
            (-*p + Jet::constant(a, p.order())) * s
        } else {
            -*p + Jet::constant(a, p.order())
        }
    }

    /// `P' = rho (p + sigma kappa(P))`.
    pub fn p_dot(&self, drive: T, p: T) -> T {
        self.rate(&Jet::constant(drive, 0), &Jet::constant(p, 0)).value()
    }

    /// Jet of `P'` from jets of the drive `p` and of `P` (same order).
    pub fn p_dot_jet(&self, drive: &Jet<T>, p: &Jet<T>) -> Result<Jet<T>, ProjectionError> {
        let order = drive.order().max(p.order());
        if order + 1 > self.smoothness_order.max(1) {
            return Err(ProjectionError::Order { order, smoothness: self.smoothness_order });
        }
        Ok(self.rate(drive, p))
    }

    fn rate(&self, drive: &Jet<T>, p: &Jet<T>) -> Jet<T> {
        (*drive + self.kappa_jet(p).scale(self.sigma)).scale(self.rho)
    }

    /// Both sides of `(P_c - P)(p - P'/rho) <= -sigma kappa^2 <= 0`.
    pub fn lemma_gap(&self, p_c: T, drive: T, p: T) -> Result<(T, T), ProjectionError> {
        if !(p_c >= self.lower && p_c <= self.upper) {
            return Err(ProjectionError::Reference(format!("{p_c}")));
        }
        let k = self.kappa(p);
        let lhs = (p_c - p) * (drive - self.p_dot(drive, p) / self.rho);
        Ok((lhs, -self.sigma * k * k))
    }
}

/// `1/2 [1 + sign tanh(1/(lo-P) + 1/(hi-P))]`, valid for `lo < P < hi`.
fn switch_jet<T: Scalar>(p: &Jet<T>, lo: T, hi: T, sign: T) -> Jet<T> {
    let m = p.order();
    let dl = (-*p).add_scalar(lo);
    let dh = (-*p).add_scalar(hi);
    let inner = dl.recip().expect("inside the zone") + dh.recip().expect("inside the zone");
    let half = T::lit(0.5);
    let x = inner.value();
    // 1/2 (1 + tanh z) == 1 / (1 + exp(-2 z)), without the cancellation near +-1
    let value = T::one() / (T::one() + (-(sign + sign) * x).exp());
    if x.tanh().abs() == T::one() {
        // saturated: every derivative of tanh vanishes in working precision
        return Jet::constant(value, m);
    }
    let mut d = [T::zero(); MAX_ORDER + 1];
    Func::Tanh.derivatives(x, m, &mut d).expect("tanh is entire");
    let mut s = inner.compose(&d[..=m]).expect("enough derivatives").scale(sign * half);
    s.set_coeff(0, value);
    s
}
