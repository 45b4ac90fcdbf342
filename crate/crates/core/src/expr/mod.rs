//! Expression language for plant regressors, input gains and reference
//! trajectories.
//!
//! Grammar (EBNF), lowest precedence first:
//!
//! ```text
//! expr      = term { ("+" | "-") term } ;
//! term      = unary { ("*" | "/") unary } ;
//! unary     = "-" unary | power ;
//! power     = primary [ "^" unary ] ;            (* right-associative *)
//! primary   = number | "t" | "pi" | state
//!           | func "(" expr ")"
//!           | "piecewise" "(" branch { "," branch } ")"
//!           | "(" expr ")" ;
//! state     = "x" digit { digit } ;              (* x1, x2, .. *)
//! func      = "sin" | "cos" | "tanh" | "exp" | "abs" | "sqrt" ;
//! branch    = guard ":" expr ;
//! guard     = [ number ("<" | "<=") ] "t" [ ("<" | "<=") number ]
//!           | "t" (">" | ">=") number ;
//! number    = digit { digit } [ "." { digit } ] [ ("e" | "E") [ "+" | "-" ] digit { digit } ] ;
//! ```
//!
//! Multiplication is always explicit. Piecewise guards are intervals in `t`
//! that must tile `[0, inf)` without overlap, e.g.
//! `piecewise(t <= 5: sin(t), t > 5: 0)`.

mod eval;
mod func;
mod parse;

use std::fmt;

use thiserror::Error;

pub use eval::{eval, eval_jet, EvalEnv, JetEnv};
pub use func::Func;
pub use parse::parse;

/// Byte range of a node in the source text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    fn join(self, other: Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// One end of a guard interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub inclusive: bool,
}

/// Interval in `t`; `None` means unbounded on that side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: Option<Bound>,
    pub hi: Option<Bound>,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        let above = match self.lo {
            None => true,
            Some(b) if b.inclusive => t >= b.value,
            Some(b) => t > b.value,
        };
        let below = match self.hi {
            None => true,
            Some(b) if b.inclusive => t <= b.value,
            Some(b) => t < b.value,
        };
        above && below
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub guard: Interval,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Const(f64),
    /// State variable `x_k`, 1-based.
    State(usize),
    Time,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Piecewise(Vec<Branch>),
}

/// Parsed expression. Equality ignores source spans.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr { kind, span: Span::default() }
    }

    pub fn constant(v: f64) -> Self {
        Expr::new(ExprKind::Const(v))
    }

    pub fn state(k: usize) -> Self {
        Expr::new(ExprKind::State(k))
    }

    pub fn time() -> Self {
        Expr::new(ExprKind::Time)
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::new(ExprKind::Binary(op, Box::new(l), Box::new(r)))
    }

    pub fn call(f: Func, arg: Expr) -> Self {
        Expr::new(ExprKind::Call(f, Box::new(arg)))
    }

    pub fn neg(e: Expr) -> Self {
        Expr::new(ExprKind::Neg(Box::new(e)))
    }

    fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Const(_) | ExprKind::State(_) | ExprKind::Time => vec![],
            ExprKind::Neg(e) | ExprKind::Call(_, e) => vec![e],
            ExprKind::Binary(_, l, r) => vec![l, r],
            ExprKind::Piecewise(bs) => bs.iter().map(|b| &b.body).collect(),
        }
    }

    /// Largest state index referenced, 0 if none.
    pub fn max_state_index(&self) -> usize {
        match self.kind {
            ExprKind::State(k) => k,
            _ => self.children().into_iter().map(Expr::max_state_index).max().unwrap_or(0),
        }
    }

    pub fn uses_time(&self) -> bool {
        matches!(self.kind, ExprKind::Time | ExprKind::Piecewise(_))
            || self.children().into_iter().any(Expr::uses_time)
    }

    /// Checks the strict-feedback restriction for subsystem `k`: only `x_1..x_k`.
    pub fn check_bound_to(&self, k: usize) -> Result<(), BindError> {
        match self.kind {
            ExprKind::State(i) if i > k => Err(BindError { index: i, subsystem: k, span: self.span }),
            _ => self.children().into_iter().try_for_each(|c| c.check_bound_to(k)),
        }
    }

    /// Finite guard endpoints of every piecewise node, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        if let ExprKind::Piecewise(bs) = &self.kind {
            for b in bs {
                out.extend(b.guard.lo.iter().chain(b.guard.hi.iter()).map(|b| b.value));
            }
        }
        for c in self.children() {
            c.collect_breakpoints(out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("x{index} at {}..{} is not available to subsystem {subsystem}", span.start, span.end)]
pub struct BindError {
    pub index: usize,
    pub subsystem: usize,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("malformed piecewise at offset {offset}: {message}")]
    MalformedPiecewise { offset: usize, message: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Empty => 0,
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::MalformedPiecewise { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero at {}..{}", span.start, span.end)]
    DivisionByZero { span: Span },
    #[error("{func} outside its domain at {}..{}", span.start, span.end)]
    Domain { func: &'static str, span: Span },
    #[error("x{index} is not bound (environment has {available} states) at {}..{}", span.start, span.end)]
    UnboundState { index: usize, available: usize, span: Span },
    #[error("no piecewise branch covers t = {t}")]
    NoBranch { t: String },
    #[error("jet order mismatch: need {needed}, got {got}")]
    OrderMismatch { needed: usize, got: usize },
}

/// Canonical rendering; `parse(&e.to_string())` reproduces `e`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Const(v) => write!(f, "{v:?}"),
            ExprKind::State(k) => write!(f, "x{k}"),
            ExprKind::Time => f.write_str("t"),
            ExprKind::Neg(e) => write!(f, "-{e}"),
            ExprKind::Binary(op, l, r) => {
                f.write_str("(")?;
                write_operand(f, l)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, r)?;
                f.write_str(")")
            }
            ExprKind::Call(func, e) => write!(f, "{}({e})", func.name()),
            ExprKind::Piecewise(bs) => {
                f.write_str("piecewise(")?;
                for (i, b) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}: {}", b.guard, b.body)?;
                }
                f.write_str(")")
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    // `-x ^ 2` would re-parse as `-(x ^ 2)`
    if matches!(e.kind, ExprKind::Neg(_)) {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = |b: &Bound| if b.inclusive { "<=" } else { "<" };
        match (self.lo, self.hi) {
            (None, None) => write!(f, "0 <= t"),
            (Some(lo), None) => write!(f, "{:?} {} t", lo.value, op(&lo)),
            (None, Some(hi)) => write!(f, "t {} {:?}", op(&hi), hi.value),
            (Some(lo), Some(hi)) => write!(f, "{:?} {} t {} {:?}", lo.value, op(&lo), op(&hi), hi.value),
        }
    }
}
