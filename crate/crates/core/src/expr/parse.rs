use super::{BinOp, Bound, Branch, Expr, ExprKind, Func, Interval, ParseError, Span};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Colon,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}"),
    }
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            b':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            out.push(Token { tok, span: Span::new(start, i) });
            continue;
        }
        if c == b'<' || c == b'>' {
            let eq = bytes.get(i + 1) == Some(&b'=');
            let tok = match (c, eq) {
                (b'<', false) => Tok::Lt,
                (b'<', true) => Tok::Le,
                (_, false) => Tok::Gt,
                (_, true) => Tok::Ge,
            };
            i += if eq { 2 } else { 1 };
            out.push(Token { tok, span: Span::new(start, i) });
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            out.push(Token { tok: Tok::Num(value), span: Span::new(start, i) });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), span: Span::new(start, i) });
            continue;
        }
        let ch = src[start..].chars().next().unwrap_or('?');
        return Err(ParseError::Syntax { offset: start, message: format!("unexpected character `{ch}`") });
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(src.len(), src.len()) });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

/// Parses an expression in the grammar documented on [`crate::expr`].
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let e = p.expr()?;
    match p.peek() {
        Tok::Eof => Ok(e),
        other => Err(p.syntax(format!("unexpected {} after expression", describe(other)))),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, message: String) -> ParseError {
        ParseError::Syntax { offset: self.span().start, message }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, ParseError> {
        if *self.peek() == want {
            Ok(self.bump())
        } else {
            Err(self.syntax(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            let start = self.bump().span;
            let inner = self.unary()?;
            let span = start.join(inner.span);
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), span });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.unary()?;
            return Ok(binary(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let tok = self.bump();
        match tok.tok {
            Tok::Num(v) => Ok(Expr { kind: ExprKind::Const(v), span: tok.span }),
            Tok::LParen => {
                let mut e = self.expr()?;
                let close = self.expect(Tok::RParen, "`)`")?;
                e.span = tok.span.join(close.span);
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(name, tok.span),
            other => {
                self.pos -= usize::from(other != Tok::Eof);
                Err(self.syntax(format!("expected an operand, found {}", describe(&other))))
            }
        }
    }

    fn identifier(&mut self, name: String, span: Span) -> Result<Expr, ParseError> {
        match name.as_str() {
            "t" => return Ok(Expr { kind: ExprKind::Time, span }),
            "pi" => return Ok(Expr { kind: ExprKind::Const(std::f64::consts::PI), span }),
            "piecewise" => return self.piecewise(span),
            _ => {}
        }
        if let Some(f) = Func::from_name(&name) {
            self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
            let arg = self.expr()?;
            let close = self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr { kind: ExprKind::Call(f, Box::new(arg)), span: span.join(close.span) });
        }
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                if let Ok(k) = digits.parse::<usize>() {
                    if k >= 1 {
                        return Ok(Expr { kind: ExprKind::State(k), span });
                    }
                }
            }
        }
        Err(ParseError::UnknownIdentifier { name, offset: span.start })
    }

    fn piecewise(&mut self, start: Span) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen, "`(` after `piecewise`")?;
        let mut branches = Vec::new();
        loop {
            let guard = self.guard()?;
            self.expect(Tok::Colon, "`:` after piecewise guard")?;
            let body = self.expr()?;
            branches.push(Branch { guard, body });
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        let close = self.expect(Tok::RParen, "`)` closing piecewise")?;
        validate_cover(&branches).map_err(|message| ParseError::MalformedPiecewise { offset: start.start, message })?;
        Ok(Expr { kind: ExprKind::Piecewise(branches), span: start.join(close.span) })
    }

    fn malformed(&self, message: &str) -> ParseError {
        ParseError::MalformedPiecewise { offset: self.span().start, message: message.to_string() }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(v)
            }
            _ => Err(self.malformed("guard bounds must be number literals")),
        }
    }

    fn is_time(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == "t")
    }

    /// `[num (<|<=)] t [(<|<=) num]` or `t (>|>=) num`.
    fn guard(&mut self) -> Result<Interval, ParseError> {
        let mut lo = None;
        if !self.is_time() {
            let value = self.number()?;
            let inclusive = match self.peek() {
                Tok::Lt => false,
                Tok::Le => true,
                _ => return Err(self.malformed("expected `<` or `<=` after lower bound")),
            };
            self.bump();
            lo = Some(Bound { value, inclusive });
        }
        if !self.is_time() {
            return Err(self.malformed("guards may only constrain `t`"));
        }
        self.bump();
        let mut hi = None;
        match self.peek() {
            Tok::Lt | Tok::Le => {
                let inclusive = *self.peek() == Tok::Le;
                self.bump();
                hi = Some(Bound { value: self.number()?, inclusive });
            }
            Tok::Gt | Tok::Ge if lo.is_none() => {
                let inclusive = *self.peek() == Tok::Ge;
                self.bump();
                lo = Some(Bound { value: self.number()?, inclusive });
            }
            _ => {}
        }
        if lo.is_none() && hi.is_none() {
            return Err(self.malformed("guard must bound `t`"));
        }
        Ok(Interval { lo, hi })
    }
}

fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
    let span = l.span.join(r.span);
    Expr { kind: ExprKind::Binary(op, Box::new(l), Box::new(r)), span }
}

/// Guards must tile `[0, inf)`: contiguous, non-overlapping, no gaps.
fn validate_cover(branches: &[Branch]) -> Result<(), String> {
    let mut ivs: Vec<Interval> = branches.iter().map(|b| b.guard).collect();
    let lo_key = |iv: &Interval| iv.lo.map_or(f64::NEG_INFINITY, |b| b.value);
    ivs.sort_by(|a, b| lo_key(a).total_cmp(&lo_key(b)));
    for iv in &ivs {
        if let (Some(lo), Some(hi)) = (iv.lo, iv.hi) {
            if lo.value > hi.value || (lo.value == hi.value && !(lo.inclusive && hi.inclusive)) {
                return Err(format!("empty interval `{iv}`"));
            }
        }
    }
    if !ivs[0].contains(0.0) {
        return Err("guards do not cover t = 0".into());
    }
    for pair in ivs.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        match (a.hi, b.lo) {
            (Some(h), Some(l)) if h.value == l.value && h.inclusive != l.inclusive => {}
            (Some(h), Some(l)) if h.value < l.value || (h.value == l.value && !h.inclusive) => {
                return Err(format!("gap between `{a}` and `{b}`"))
            }
            _ => return Err(format!("`{a}` overlaps `{b}`")),
        }
    }
    if ivs.last().unwrap().hi.is_some() {
        return Err("guards do not extend to t = inf".into());
    }
    Ok(())
}
