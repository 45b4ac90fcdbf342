use super::func::ln_derivatives;
use super::{BinOp, EvalError, Expr, ExprKind, Span};
use crate::jet::{Jet, JetError, MAX_ORDER};
use crate::Scalar;

/// Real-valued evaluation environment: time and state `x_1..x_n`.
#[derive(Debug, Clone, Copy)]
pub struct EvalEnv<'a, T> {
    pub t: T,
    pub x: &'a [T],
}

/// Jet evaluation environment. `t` should be `(t, 1, 0, ..)`; state jets
/// carry the time derivatives of `x_k`.
#[derive(Debug, Clone, Copy)]
pub struct JetEnv<'a, T> {
    pub t: Jet<T>,
    pub x: &'a [Jet<T>],
}

/// The arithmetic an expression walk needs. Implemented once for plain
/// scalars and once for jets so both evaluations share the same tree walk
/// (and the same floating point operation sequence at order 0).
trait Domain<T: Scalar> {
    type V: Copy;
    fn constant(&self, c: T) -> Self::V;
    fn time(&self) -> Self::V;
    fn time_value(&self) -> T;
    fn state(&self, k: usize, span: Span) -> Result<Self::V, EvalError>;
    fn add(&self, a: Self::V, b: Self::V) -> Self::V;
    fn sub(&self, a: Self::V, b: Self::V) -> Self::V;
    fn mul(&self, a: Self::V, b: Self::V) -> Self::V;
    fn neg(&self, a: Self::V) -> Self::V;
    fn div(&self, a: Self::V, b: Self::V, span: Span) -> Result<Self::V, EvalError>;
    fn value(&self, a: Self::V) -> T;
    /// Apply a univariate function given its derivative tower at `value(a)`.
    fn apply(&self, a: Self::V, f_derivs: &[T]) -> Self::V;
    fn order(&self) -> usize;
}

struct Reals<'a, T>(EvalEnv<'a, T>);

impl<T: Scalar> Domain<T> for Reals<'_, T> {
    type V = T;
    fn constant(&self, c: T) -> T {
        c
    }
    fn time(&self) -> T {
        self.0.t
    }
    fn time_value(&self) -> T {
        self.0.t
    }
    fn state(&self, k: usize, span: Span) -> Result<T, EvalError> {
        self.0.x.get(k - 1).copied().ok_or(EvalError::UnboundState { index: k, available: self.0.x.len(), span })
    }
    fn add(&self, a: T, b: T) -> T {
        a + b
    }
    fn sub(&self, a: T, b: T) -> T {
        a - b
    }
    fn mul(&self, a: T, b: T) -> T {
        a * b
    }
    fn neg(&self, a: T) -> T {
        -a
    }
    fn div(&self, a: T, b: T, span: Span) -> Result<T, EvalError> {
        if b == T::zero() {
            return Err(EvalError::DivisionByZero { span });
        }
        Ok(a / b)
    }
    fn value(&self, a: T) -> T {
        a
    }
    fn apply(&self, _a: T, f_derivs: &[T]) -> T {
        f_derivs[0]
    }
    fn order(&self) -> usize {
        0
    }
}

struct Jets<'a, T> {
    env: JetEnv<'a, T>,
    order: usize,
}

impl<T: Scalar> Domain<T> for Jets<'_, T> {
    type V = Jet<T>;
    fn constant(&self, c: T) -> Jet<T> {
        Jet::constant(c, self.order)
    }
    fn time(&self) -> Jet<T> {
        self.env.t.truncate(self.order)
    }
    fn time_value(&self) -> T {
        self.env.t.value()
    }
    fn state(&self, k: usize, span: Span) -> Result<Jet<T>, EvalError> {
        self.env
            .x
            .get(k - 1)
            .map(|j| j.truncate(self.order))
            .ok_or(EvalError::UnboundState { index: k, available: self.env.x.len(), span })
    }
    fn add(&self, a: Jet<T>, b: Jet<T>) -> Jet<T> {
        a + b
    }
    fn sub(&self, a: Jet<T>, b: Jet<T>) -> Jet<T> {
        a - b
    }
    fn mul(&self, a: Jet<T>, b: Jet<T>) -> Jet<T> {
        a * b
    }
    fn neg(&self, a: Jet<T>) -> Jet<T> {
        -a
    }
    fn div(&self, a: Jet<T>, b: Jet<T>, span: Span) -> Result<Jet<T>, EvalError> {
        a.checked_div(&b).map_err(|_| EvalError::DivisionByZero { span })
    }
    fn value(&self, a: Jet<T>) -> T {
        a.value()
    }
    fn apply(&self, a: Jet<T>, f_derivs: &[T]) -> Jet<T> {
        a.compose(f_derivs).expect("derivative tower sized to jet order")
    }
    fn order(&self) -> usize {
        self.order
    }
}

/// Evaluates `ast` in IEEE arithmetic.
pub fn eval<T: Scalar>(ast: &Expr, env: EvalEnv<'_, T>) -> Result<T, EvalError> {
    walk(ast, &Reals(env))
}

/// Evaluates `ast` along the supplied jets; coefficient `i` of the result is
/// the `i`-th time derivative of the expression. Inputs of higher order are
/// truncated to `order`.
pub fn eval_jet<T: Scalar>(ast: &Expr, env: JetEnv<'_, T>, order: usize) -> Result<Jet<T>, EvalError> {
    if order > MAX_ORDER {
        return Err(EvalError::OrderMismatch { needed: order, got: MAX_ORDER });
    }
    if env.t.order() < order {
        return Err(EvalError::OrderMismatch { needed: order, got: env.t.order() });
    }
    if let Some(low) = env.x.iter().map(Jet::order).filter(|&o| o < order).min() {
        return Err(EvalError::OrderMismatch { needed: order, got: low });
    }
    walk(ast, &Jets { env, order })
}

fn walk<T: Scalar, D: Domain<T>>(ast: &Expr, d: &D) -> Result<D::V, EvalError> {
    Ok(match &ast.kind {
        ExprKind::Const(c) => d.constant(T::lit(*c)),
        ExprKind::State(k) => d.state(*k, ast.span)?,
        ExprKind::Time => d.time(),
        ExprKind::Neg(e) => d.neg(walk(e, d)?),
        ExprKind::Binary(BinOp::Pow, l, r) => return pow(l, r, ast.span, d),
        ExprKind::Binary(op, l, r) => {
            let a = walk(l, d)?;
            let b = walk(r, d)?;
            match op {
                BinOp::Add => d.add(a, b),
                BinOp::Sub => d.sub(a, b),
                BinOp::Mul => d.mul(a, b),
                BinOp::Div => d.div(a, b, ast.span)?,
                BinOp::Pow => unreachable!(),
            }
        }
        ExprKind::Call(f, e) => {
            let a = walk(e, d)?;
            let mut derivs = [T::zero(); MAX_ORDER + 1];
            f.derivatives(d.value(a), d.order(), &mut derivs)
                .map_err(|_| EvalError::Domain { func: f.name(), span: ast.span })?;
            d.apply(a, &derivs)
        }
        ExprKind::Piecewise(branches) => {
            let t = d.time_value();
            let tf = t.to_f64_lossy();
            let branch = branches
                .iter()
                .find(|b| b.guard.contains(tf))
                .ok_or_else(|| EvalError::NoBranch { t: format!("{t}") })?;
            walk(&branch.body, d)?
        }
    })
}

/// Integer literal exponents (optionally negated) use repeated products;
/// anything else goes through `exp(r * ln(l))`.
fn integer_exponent(r: &Expr) -> Option<i32> {
    let (v, sign) = match &r.kind {
        ExprKind::Const(v) => (*v, 1.0),
        ExprKind::Neg(inner) => match inner.kind {
            ExprKind::Const(v) => (v, -1.0),
            _ => return None,
        },
        _ => return None,
    };
    (v.fract() == 0.0 && v.abs() <= 64.0).then_some((sign * v) as i32)
}

fn pow<T: Scalar, D: Domain<T>>(l: &Expr, r: &Expr, span: Span, d: &D) -> Result<D::V, EvalError> {
    let base = walk(l, d)?;
    if let Some(n) = integer_exponent(r) {
        let mut acc = d.constant(T::one());
        if n != 0 {
            acc = base;
            for _ in 1..n.unsigned_abs() {
                acc = d.mul(acc, base);
            }
        }
        return if n < 0 { d.div(d.constant(T::one()), acc, span) } else { Ok(acc) };
    }
    let exponent = walk(r, d)?;
    let mut derivs = [T::zero(); MAX_ORDER + 1];
    ln_derivatives(d.value(base), d.order(), &mut derivs).map_err(|_| EvalError::Domain { func: "pow", span })?;
    let ln_base = d.apply(base, &derivs);
    let prod = d.mul(exponent, ln_base);
    crate::expr::Func::Exp
        .derivatives(d.value(prod), d.order(), &mut derivs)
        .map_err(|_| EvalError::Domain { func: "pow", span })?;
    Ok(d.apply(prod, &derivs))
}

impl From<JetError> for EvalError {
    fn from(e: JetError) -> Self {
        match e {
            JetError::OrderMismatch { left, right } => EvalError::OrderMismatch { needed: left, got: right },
            _ => EvalError::DivisionByZero { span: Span::default() },
        }
    }
}
