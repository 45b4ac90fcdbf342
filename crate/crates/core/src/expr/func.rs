use std::sync::OnceLock;

use crate::jet::MAX_ORDER;
use crate::Scalar;

/// Built-in unary functions. Each one knows its derivatives to any order,
/// which is all [`crate::jet::Jet::compose`] needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tanh,
    Exp,
    Abs,
    Sqrt,
}

const REGISTRY: [(&str, Func); 6] = [
    ("sin", Func::Sin),
    ("cos", Func::Cos),
    ("tanh", Func::Tanh),
    ("exp", Func::Exp),
    ("abs", Func::Abs),
    ("sqrt", Func::Sqrt),
];

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        REGISTRY.iter().find(|(n, _)| *n == name).map(|(_, f)| *f)
    }

    pub fn name(self) -> &'static str {
        REGISTRY.iter().find(|(_, f)| *f == self).map(|(n, _)| *n).unwrap()
    }

    /// Writes `f(u0), f'(u0), .., f^(order)(u0)` into `out[..=order]`.
    /// Returns `Err(())` outside the function's (differentiable) domain.
    pub(crate) fn derivatives<T: Scalar>(self, u0: T, order: usize, out: &mut [T]) -> Result<(), ()> {
        match self {
            Func::Sin | Func::Cos => {
                let (s, c) = (u0.sin(), u0.cos());
                let cycle = [s, c, -s, -c];
                let shift = if self == Func::Sin { 0 } else { 1 };
                for (k, o) in out[..=order].iter_mut().enumerate() {
                    *o = cycle[(k + shift) % 4];
                }
            }
            Func::Exp => {
                let e = u0.exp();
                out[..=order].fill(e);
            }
            Func::Tanh => tanh_derivatives(u0, order, out),
            Func::Abs => {
                out[0] = u0.abs();
                if order >= 1 {
                    out[1] = if u0 > T::zero() {
                        T::one()
                    } else if u0 < T::zero() {
                        -T::one()
                    } else {
                        T::zero()
                    };
                    out[2..=order].fill(T::zero());
                }
            }
            Func::Sqrt => {
                if u0 < T::zero() || (u0 == T::zero() && order > 0) {
                    return Err(());
                }
                out[0] = u0.sqrt();
                let half = T::lit(0.5);
                for k in 1..=order {
                    out[k] = out[k - 1] * (half - T::lit((k - 1) as f64)) / u0;
                }
            }
        }
        Ok(())
    }
}

/// Derivatives of `ln` at `u0 > 0`; used for non-integer powers.
pub(crate) fn ln_derivatives<T: Scalar>(u0: T, order: usize, out: &mut [T]) -> Result<(), ()> {
    if u0 <= T::zero() {
        return Err(());
    }
    out[0] = u0.ln();
    if order >= 1 {
        out[1] = u0.recip();
        for k in 2..=order {
            out[k] = -out[k - 1] * T::lit((k - 1) as f64) / u0;
        }
    }
    Ok(())
}

/// `d^k/du^k tanh(u) = P_k(tanh u)` with `P_0(y) = y`, `P_(k+1) = P_k'(y) (1 - y^2)`.
/// Coefficients are integers, lowest degree first.
fn tanh_polynomials() -> &'static [Vec<f64>] {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        let mut polys = vec![vec![0.0, 1.0]];
        for _ in 0..MAX_ORDER {
            let prev = polys.last().unwrap();
            let deriv: Vec<f64> = prev.iter().enumerate().skip(1).map(|(d, c)| c * d as f64).collect();
            let mut next = vec![0.0; deriv.len() + 2];
            for (d, c) in deriv.iter().enumerate() {
                next[d] += c;
                next[d + 2] -= c;
            }
            polys.push(next);
        }
        polys
    })
}

fn tanh_derivatives<T: Scalar>(u0: T, order: usize, out: &mut [T]) {
    let y = u0.tanh();
    out[0] = y;
    let polys = tanh_polynomials();
    for (k, o) in out.iter_mut().enumerate().take(order + 1).skip(1) {
        *o = polys[k].iter().rev().fold(T::zero(), |acc, c| acc * y + T::lit(*c));
    }
}
