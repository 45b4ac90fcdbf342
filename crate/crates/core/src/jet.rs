//! Truncated Taylor jets in time.
//!
//! A [`Jet`] of order `m` holds a signal `s(t)` and its first `m` time
//! derivatives as *raw* derivatives `[s, s', s'', ..]`, not the normalized
//! Taylor coefficients `s^(i)/i!`. Products therefore carry binomial weights
//! (Leibniz rule), and logged coefficients stay in physical units.
//!
//! Every operation computes coefficient `i` from coefficients `0..=i` of its
//! inputs with the same sequence of floating point operations regardless of
//! the jet order. Truncating a high-order result is therefore bit-identical to
//! computing at the lower order, which the controller relies on.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::Scalar;

/// Largest supported jet order (number of derivatives carried).
pub const MAX_ORDER: usize = 16;
const LEN: usize = MAX_ORDER + 1;

const fn binomial_table() -> [[f64; LEN]; LEN] {
    let mut t = [[0.0; LEN]; LEN];
    let mut i = 0;
    while i < LEN {
        t[i][0] = 1.0;
        let mut j = 1;
        while j <= i {
            t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
            j += 1;
        }
        i += 1;
    }
    t
}

const fn factorial_table() -> [f64; LEN] {
    let mut f = [1.0; LEN];
    let mut i = 1;
    while i < LEN {
        f[i] = f[i - 1] * i as f64;
        i += 1;
    }
    f
}

const BINOMIAL: [[f64; LEN]; LEN] = binomial_table();
const FACTORIAL: [f64; LEN] = factorial_table();

#[inline]
fn binom<T: Scalar>(i: usize, j: usize) -> T {
    T::lit(BINOMIAL[i][j])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("jet order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("jet order {order} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge { order: usize },
    #[error("division by a jet whose value is zero")]
    DivisionByZero,
    #[error("composition needs {needed} derivative values, got {got}")]
    Arity { needed: usize, got: usize },
    #[error("cannot differentiate an order-0 jet")]
    NoDerivative,
}

/// Value plus time derivatives up to `order`.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet<T> {
    order: usize,
    c: [T; LEN],
}

impl<T: Scalar> Jet<T> {
    /// Constant signal: all derivatives zero.
    ///
    /// Panics if `order > MAX_ORDER`; use [`Jet::from_coeffs`] for a checked
    /// constructor.
    #[inline]
    pub fn constant(value: T, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} > {MAX_ORDER}");
        let mut c = [T::zero(); LEN];
        c[0] = value;
        Jet { order, c }
    }

    /// The independent variable itself, `(t, 1, 0, ..)`.
    #[inline]
    pub fn variable(value: T, order: usize) -> Self {
        let mut j = Self::constant(value, order);
        if order > 0 {
            j.c[1] = T::one();
        }
        j
    }

    #[inline]
    pub fn zero(order: usize) -> Self {
        Self::constant(T::zero(), order)
    }

    /// Builds a jet from raw derivatives `[s, s', .., s^(m)]`.
    pub fn from_coeffs(coeffs: &[T]) -> Result<Self, JetError> {
        let order = coeffs.len().checked_sub(1).ok_or(JetError::Arity { needed: 1, got: 0 })?;
        if order > MAX_ORDER {
            return Err(JetError::OrderTooLarge { order });
        }
        let mut c = [T::zero(); LEN];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(Jet { order, c })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn value(&self) -> T {
        self.c[0]
    }

    /// The `i`-th time derivative. Panics if `i > order`.
    #[inline]
    pub fn coeff(&self, i: usize) -> T {
        assert!(i <= self.order, "coefficient {i} of an order-{} jet", self.order);
        self.c[i]
    }

    #[inline]
    pub fn coeffs(&self) -> &[T] {
        &self.c[..=self.order]
    }

    #[inline]
    pub(crate) fn set_coeff(&mut self, i: usize, v: T) {
        debug_assert!(i <= self.order);
        self.c[i] = v;
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|v| v.is_finite())
    }

    /// Largest absolute coefficient.
    #[inline]
    pub fn max_abs(&self) -> T {
        self.coeffs().iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Drops derivatives above `order`. Panics if `order` exceeds the current order.
    #[inline]
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order, "cannot extend an order-{} jet to {order}", self.order);
        let mut out = *self;
        for v in &mut out.c[order + 1..=self.order] {
            *v = T::zero();
        }
        out.order = order;
        out
    }

    /// Jet of the time derivative `s'`, one order lower.
    #[inline]
    pub fn derivative(&self) -> Result<Self, JetError> {
        if self.order == 0 {
            return Err(JetError::NoDerivative);
        }
        let mut c = [T::zero(); LEN];
        c[..self.order].copy_from_slice(&self.c[1..=self.order]);
        Ok(Jet { order: self.order - 1, c })
    }

    #[inline]
    fn same_order(&self, other: &Self) -> Result<(), JetError> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(JetError::OrderMismatch { left: self.order, right: other.order })
        }
    }

    #[inline]
    pub fn checked_add(&self, other: &Self) -> Result<Self, JetError> {
        self.same_order(other)?;
        let mut out = *self;
        for i in 0..=self.order {
            out.c[i] = self.c[i] + other.c[i];
        }
        Ok(out)
    }

    #[inline]
    pub fn checked_sub(&self, other: &Self) -> Result<Self, JetError> {
        self.same_order(other)?;
        let mut out = *self;
        for i in 0..=self.order {
            out.c[i] = self.c[i] - other.c[i];
        }
        Ok(out)
    }

    /// Leibniz product `c_i = sum_j C(i,j) a_j b_(i-j)`.
    #[inline]
    pub fn checked_mul(&self, other: &Self) -> Result<Self, JetError> {
        self.same_order(other)?;
        let mut out = Self::zero(self.order);
        for i in 0..=self.order {
            // seeded with the j = 0 term so the sign of a zero product survives
            let mut acc = self.c[0] * other.c[i];
            for j in 1..=i {
                acc = acc + binom::<T>(i, j) * self.c[j] * other.c[i - j];
            }
            out.c[i] = acc;
        }
        Ok(out)
    }

    /// Quotient `q` with `q * other == self` up to the jet order.
    #[inline]
    pub fn checked_div(&self, other: &Self) -> Result<Self, JetError> {
        self.same_order(other)?;
        let b0 = other.c[0];
        if b0 == T::zero() {
            return Err(JetError::DivisionByZero);
        }
        let mut q = Self::zero(self.order);
        for i in 0..=self.order {
            let mut acc = self.c[i];
            for j in 0..i {
                acc = acc - binom::<T>(i, j) * q.c[j] * other.c[i - j];
            }
            q.c[i] = acc / b0;
        }
        Ok(q)
    }

    #[inline]
    pub fn recip(&self) -> Result<Self, JetError> {
        Self::constant(T::one(), self.order).checked_div(self)
    }

    #[inline]
    pub fn scale(&self, k: T) -> Self {
        let mut out = *self;
        for v in &mut out.c[..=self.order] {
            *v = *v * k;
        }
        out
    }

    #[inline]
    pub fn add_scalar(&self, k: T) -> Self {
        let mut out = *self;
        out.c[0] = out.c[0] + k;
        out
    }

    /// Chain rule for `f(u(t))`, given `f(u0), f'(u0), .., f^(m)(u0)` at
    /// `u0 = self.value()` (Faa di Bruno via normalized power series).
    pub fn compose(&self, f_derivs: &[T]) -> Result<Self, JetError> {
        let m = self.order;
        if f_derivs.len() < m + 1 {
            return Err(JetError::Arity { needed: m + 1, got: f_derivs.len() });
        }
        // h = u - u0 as a normalized series; h_0 = 0.
        let mut h = [T::zero(); LEN];
        for i in 1..=m {
            h[i] = self.c[i] / T::lit(FACTORIAL[i]);
        }
        let mut acc = [T::zero(); LEN];
        let mut pow = [T::zero(); LEN];
        pow[0] = T::one();
        for k in 0..=m {
            if k > 0 {
                // pow_k = pow_(k-1) * h; both vanish below their valuation.
                let mut next = [T::zero(); LEN];
                for i in k..=m {
                    let mut s = T::zero();
                    for j in (k - 1)..i {
                        s = s + pow[j] * h[i - j];
                    }
                    next[i] = s;
                }
                pow = next;
            }
            let w = f_derivs[k] / T::lit(FACTORIAL[k]);
            for i in k..=m {
                acc[i] = acc[i] + w * pow[i];
            }
        }
        let mut out = Self::zero(m);
        out.c[0] = f_derivs[0];
        for i in 1..=m {
            out.c[i] = acc[i] * T::lit(FACTORIAL[i]);
        }
        Ok(out)
    }
}

impl<T: fmt::Debug> fmt::Debug for Jet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Jet").field(&&self.c[..=self.order]).finish()
    }
}

impl<T: Scalar> Add for Jet<T> {
    type Output = Jet<T>;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("jet add")
    }
}

impl<T: Scalar> Sub for Jet<T> {
    type Output = Jet<T>;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).expect("jet sub")
    }
}

impl<T: Scalar> Mul for Jet<T> {
    type Output = Jet<T>;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("jet mul")
    }
}

impl<T: Scalar> Mul<T> for Jet<T> {
    type Output = Jet<T>;
    #[inline]
    fn mul(self, rhs: T) -> Self {
        self.scale(rhs)
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Jet<T>;
    #[inline]
    fn neg(self) -> Self {
        let mut out = self;
        for v in &mut out.c[..=self.order] {
            *v = -*v;
        }
        out
    }
}
