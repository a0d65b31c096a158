//! Arithmetic expression DSL for metric coefficients, graph functions and
//! prescribed-curvature data.
//!
//! Grammar (whitespace-insensitive, decimal point only):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' unary)?
//! atom    := number | var | func '(' expr ')' | '(' expr ')'
//! var     := 'x' | 'y' | 't' | 's'
//! func    := 'sin' | 'cos' | 'exp' | 'log' | 'sqrt' | 'abs' | 'tanh'
//! number  := digits ('.' digits?)? (('e' | 'E') ('+' | '-')? digits)?
//! ```
//!
//! `^` is right associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)`. Evaluation carries exact first partials through the tree
//! with forward-mode dual numbers.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
    T,
    S,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::X, Var::Y, Var::T, Var::S];

    fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::T => 2,
            Var::S => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::T => "t",
            Var::S => "s",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Tanh,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
        Func::Tanh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Tanh => "tanh",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
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
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Syntax tree of a parsed expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("variable `{name}` at offset {offset} is not allowed here")]
    VariableNotAllowed { name: String, offset: usize },
    #[error("unexpected {found} at offset {offset}")]
    Unexpected { found: String, offset: usize },
}

impl ParseError {
    /// Byte offset of the offending token, when there is one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Empty => None,
            ParseError::UnknownIdentifier { offset, .. }
            | ParseError::VariableNotAllowed { offset, .. }
            | ParseError::Unexpected { offset, .. } => Some(*offset),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{func} outside its domain (argument {arg})")]
    Domain { func: &'static str, arg: f64 },
    #[error("non-finite intermediate value in `{op}`")]
    NonFinite { op: &'static str },
    #[error("variable `{0}` has no value at the evaluation point")]
    Unbound(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Op(c) => format!("operator `{c}`"),
        Tok::LParen => "`(`".to_string(),
        Tok::RParen => "`)`".to_string(),
        Tok::End => "end of input".to_string(),
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
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
            let value: f64 = text.parse().map_err(|_| ParseError::Unexpected {
                found: format!("malformed number `{text}`"),
                offset: start,
            })?;
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else {
            let tok = match c {
                b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                _ => {
                    let ch = src[start..].chars().next().unwrap_or('?');
                    return Err(ParseError::Unexpected {
                        found: format!("character `{ch}`"),
                        offset: start,
                    });
                }
            };
            i += 1;
            out.push((tok, start));
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    allowed: &'a [Var],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> ParseError {
        ParseError::Unexpected {
            found: describe(self.peek()),
            offset: self.offset(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(var) = Var::ALL.into_iter().find(|v| v.name() == name) {
                    if !self.allowed.contains(&var) {
                        return Err(ParseError::VariableNotAllowed { name, offset });
                    }
                    return Ok(Expr::Var(var));
                }
                let func = Func::from_name(&name)
                    .ok_or(ParseError::UnknownIdentifier { name, offset })?;
                if *self.peek() != Tok::LParen {
                    return Err(self.unexpected());
                }
                self.bump();
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            _ => Err(self.unexpected()),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }
}

/// Parses `source` allowing all four variables.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    parse_with_vars(source, &Var::ALL)
}

/// Parses `source`, rejecting variables outside `allowed`.
pub fn parse_with_vars(source: &str, allowed: &[Var]) -> Result<Expr, ParseError> {
    if source.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let toks = tokenize(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        allowed,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected());
    }
    Ok(e)
}

// Printing is fully parenthesized so that parse(print(e)) == e.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

/// Value with exact partials with respect to (x, y, t, s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: [f64; 4],
}

impl Dual {
    pub fn constant(v: f64) -> Self {
        Dual { v, d: [0.0; 4] }
    }

    fn var(v: f64, idx: usize) -> Self {
        let mut d = [0.0; 4];
        d[idx] = 1.0;
        Dual { v, d }
    }

    pub fn partial(&self, var: Var) -> f64 {
        self.d[var.index()]
    }

    fn is_const(&self) -> bool {
        self.d.iter().all(|&x| x == 0.0)
    }

    // Chain rule with 0 * inf := 0, so that e.g. sqrt(0) of a constant stays finite.
    fn chain(v: f64, inner: &Dual, factor: f64) -> Dual {
        let mut d = [0.0; 4];
        for (o, &i) in d.iter_mut().zip(inner.d.iter()) {
            if i != 0.0 {
                *o = i * factor;
            }
        }
        Dual { v, d }
    }

    fn checked(self, op: &'static str) -> Result<Dual, EvalError> {
        if self.v.is_finite() && self.d.iter().all(|x| x.is_finite()) {
            Ok(self)
        } else {
            Err(EvalError::NonFinite { op })
        }
    }
}

impl Expr {
    /// Evaluates value and all four partials. `point` holds (x, y, t, s);
    /// `None` entries are unbound and fail if referenced.
    pub fn eval_dual(&self, point: &[Option<f64>; 4]) -> Result<Dual, EvalError> {
        match self {
            Expr::Num(v) => Ok(Dual::constant(*v)),
            Expr::Var(var) => {
                let i = var.index();
                point[i]
                    .map(|v| Dual::var(v, i))
                    .ok_or(EvalError::Unbound(var.name()))
            }
            Expr::Neg(e) => {
                let a = e.eval_dual(point)?;
                Ok(Dual {
                    v: -a.v,
                    d: a.d.map(|x| -x),
                })
            }
            Expr::Bin(op, l, r) => {
                let a = l.eval_dual(point)?;
                let b = r.eval_dual(point)?;
                binary(*op, a, b)
            }
            Expr::Call(func, e) => unary(*func, e.eval_dual(point)?),
        }
    }

    /// Plain evaluation without derivatives.
    pub fn eval(&self, point: &[Option<f64>; 4]) -> Result<f64, EvalError> {
        self.eval_dual(point).map(|d| d.v)
    }

    /// Variables that occur in the tree.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => out.push(*v),
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

fn binary(op: BinOp, a: Dual, b: Dual) -> Result<Dual, EvalError> {
    let mut d = [0.0; 4];
    match op {
        BinOp::Add => {
            for i in 0..4 {
                d[i] = a.d[i] + b.d[i];
            }
            Dual { v: a.v + b.v, d }.checked("+")
        }
        BinOp::Sub => {
            for i in 0..4 {
                d[i] = a.d[i] - b.d[i];
            }
            Dual { v: a.v - b.v, d }.checked("-")
        }
        BinOp::Mul => {
            for i in 0..4 {
                d[i] = a.d[i] * b.v + a.v * b.d[i];
            }
            Dual { v: a.v * b.v, d }.checked("*")
        }
        BinOp::Div => {
            if b.v == 0.0 {
                return Err(EvalError::NonFinite { op: "/" });
            }
            let v = a.v / b.v;
            for i in 0..4 {
                d[i] = (a.d[i] - v * b.d[i]) / b.v;
            }
            Dual { v, d }.checked("/")
        }
        BinOp::Pow => {
            if b.is_const() {
                let n = b.v;
                if a.v < 0.0 && n.fract() != 0.0 {
                    return Err(EvalError::Domain {
                        func: "^",
                        arg: a.v,
                    });
                }
                let v = a.v.powf(n);
                let factor = if n == 0.0 { 0.0 } else { n * a.v.powf(n - 1.0) };
                Dual::chain(v, &a, factor).checked("^")
            } else {
                if a.v <= 0.0 {
                    return Err(EvalError::Domain {
                        func: "^",
                        arg: a.v,
                    });
                }
                let v = a.v.powf(b.v);
                let ln = a.v.ln();
                for i in 0..4 {
                    d[i] = v * (b.d[i] * ln + b.v * a.d[i] / a.v);
                }
                Dual { v, d }.checked("^")
            }
        }
    }
}

fn unary(func: Func, a: Dual) -> Result<Dual, EvalError> {
    let x = a.v;
    let out = match func {
        Func::Sin => Dual::chain(x.sin(), &a, x.cos()),
        Func::Cos => Dual::chain(x.cos(), &a, -x.sin()),
        Func::Exp => {
            let e = x.exp();
            Dual::chain(e, &a, e)
        }
        Func::Log => {
            if x <= 0.0 {
                return Err(EvalError::Domain { func: "log", arg: x });
            }
            Dual::chain(x.ln(), &a, 1.0 / x)
        }
        Func::Sqrt => {
            if x < 0.0 {
                return Err(EvalError::Domain { func: "sqrt", arg: x });
            }
            let r = x.sqrt();
            Dual::chain(r, &a, 0.5 / r)
        }
        // Subgradient 0 at the origin.
        Func::Abs => {
            let sign = if x > 0.0 {
                1.0
            } else if x < 0.0 {
                -1.0
            } else {
                0.0
            };
            Dual::chain(x.abs(), &a, sign)
        }
        Func::Tanh => {
            let th = x.tanh();
            Dual::chain(th, &a, 1.0 - th * th)
        }
    };
    out.checked(func.name())
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("point is missing a value for `{0}`")]
    MissingVar(&'static str),
}

/// An expression restricted to a declared subset of {x, y, t, s}.
///
/// Cloning is cheap; the tree is shared and immutable.
#[derive(Debug, Clone)]
pub struct ScalarField {
    source: Arc<str>,
    expr: Arc<Expr>,
    vars: Vec<Var>,
    constant: Option<f64>,
}

impl ScalarField {
    pub fn parse(source: &str, vars: &[Var]) -> Result<Self, ParseError> {
        let expr = parse_with_vars(source, vars)?;
        let mut vars = vars.to_vec();
        vars.sort();
        vars.dedup();
        let constant = match expr {
            Expr::Num(v) => Some(v),
            _ => None,
        };
        Ok(ScalarField {
            source: source.into(),
            expr: Arc::new(expr),
            vars,
            constant,
        })
    }

    pub fn constant(value: f64, vars: &[Var]) -> Self {
        let expr = Expr::Num(value);
        let mut vars = vars.to_vec();
        vars.sort();
        vars.dedup();
        ScalarField {
            source: format!("{value:?}").into(),
            expr: Arc::new(expr),
            vars,
            constant: Some(value),
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    /// `Some(c)` when the field is a bare literal.
    pub fn as_constant(&self) -> Option<f64> {
        self.constant
    }

    /// Value and partials in the order of [`ScalarField::vars`].
    pub fn eval_with_grad(&self, point: &[(Var, f64)]) -> Result<(f64, Vec<f64>), FieldError> {
        let mut slots = [None; 4];
        for &var in &self.vars {
            let value = point
                .iter()
                .find(|(v, _)| *v == var)
                .map(|(_, x)| *x)
                .ok_or(FieldError::MissingVar(var.name()))?;
            slots[var.index()] = Some(value);
        }
        let d = self.expr.eval_dual(&slots)?;
        Ok((d.v, self.vars.iter().map(|&v| d.partial(v)).collect()))
    }

    /// Fast path used by the geometry modules: all four slots supplied,
    /// variables outside the declared set are ignored by construction.
    #[inline]
    pub fn dual_at(&self, x: f64, y: f64, t: f64, s: f64) -> Result<Dual, EvalError> {
        if let Some(c) = self.constant {
            return Ok(Dual::constant(c));
        }
        self.expr
            .eval_dual(&[Some(x), Some(y), Some(t), Some(s)])
    }

    #[inline]
    pub fn value_at(&self, x: f64, y: f64, t: f64, s: f64) -> Result<f64, EvalError> {
        self.dual_at(x, y, t, s).map(|d| d.v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(src: &str, pt: &[(Var, f64)]) -> (f64, Vec<f64>) {
        let vars: Vec<Var> = pt.iter().map(|p| p.0).collect();
        ScalarField::parse(src, &vars)
            .unwrap()
            .eval_with_grad(pt)
            .unwrap()
    }

    #[test]
    fn simple_arithmetic() {
        let (v, _) = at("x + 2*t", &[(Var::X, 1.0), (Var::T, 3.0)]);
        assert_eq!(v, 7.0);
    }

    #[test]
    fn power_rule() {
        let (_, g) = at("x^2", &[(Var::X, 3.0)]);
        assert_eq!(g, vec![6.0]);
    }

    #[test]
    fn malformed_reports_offset() {
        let err = parse("x + * 2").unwrap_err();
        assert_eq!(err.offset(), Some(4));
        assert_eq!(parse("x +").unwrap_err().offset(), Some(3));
    }

    #[test]
    fn sin_times_t() {
        let (v, g) = at("sin(x)*t", &[(Var::X, 0.0), (Var::T, 2.0)]);
        assert_eq!(v, 0.0);
        assert_eq!(g, vec![2.0, 0.0]);
    }

    #[test]
    fn identity_y() {
        let (v, g) = at("y", &[(Var::Y, 5.0)]);
        assert_eq!((v, g), (5.0, vec![1.0]));
    }

    #[test]
    fn exp_product_matches_central_differences() {
        let f = ScalarField::parse("exp(x*t)", &[Var::X, Var::T]).unwrap();
        let (_, g) = f.eval_with_grad(&[(Var::X, 1.0), (Var::T, 1.0)]).unwrap();
        let e = std::f64::consts::E;
        assert!((g[0] - e).abs() < 1e-15 && (g[1] - e).abs() < 1e-15);
        let h = 1e-6;
        let ev = |x: f64, t: f64| f.value_at(x, 0.0, t, 0.0).unwrap();
        let fd_x = (ev(1.0 + h, 1.0) - ev(1.0 - h, 1.0)) / (2.0 * h);
        let fd_t = (ev(1.0, 1.0 + h) - ev(1.0, 1.0 - h)) / (2.0 * h);
        assert!(((g[0] - fd_x) / g[0]).abs() <= 1e-8);
        assert!(((g[1] - fd_t) / g[1]).abs() <= 1e-8);
    }

    #[test]
    fn errors() {
        assert_eq!(parse("").unwrap_err(), ParseError::Empty);
        assert!(matches!(
            parse("foo(x)"),
            Err(ParseError::UnknownIdentifier { offset: 0, .. })
        ));
        assert!(matches!(
            parse_with_vars("x + y", &[Var::X]),
            Err(ParseError::VariableNotAllowed { offset: 4, .. })
        ));
        assert!(parse("sin x").is_err());
        assert!(parse("(x").is_err());
        assert!(parse("x)").is_err());
        assert!(parse("1,5").is_err());
        let f = ScalarField::parse("sqrt(x)", &[Var::X]).unwrap();
        assert!(matches!(
            f.eval_with_grad(&[(Var::X, -1.0)]),
            Err(FieldError::Eval(EvalError::Domain { .. }))
        ));
        let f = ScalarField::parse("1/x", &[Var::X]).unwrap();
        assert!(f.eval_with_grad(&[(Var::X, 0.0)]).is_err());
        assert!(matches!(
            f.eval_with_grad(&[(Var::T, 1.0)]),
            Err(FieldError::MissingVar("x"))
        ));
    }

    #[test]
    fn abs_subgradient_zero_at_origin() {
        let (v, g) = at("abs(x)", &[(Var::X, 0.0)]);
        assert_eq!((v, g), (0.0, vec![0.0]));
        let (_, g) = at("abs(x)", &[(Var::X, -2.0)]);
        assert_eq!(g, vec![-1.0]);
    }

    #[test]
    fn precedence_and_associativity() {
        let ev = |s: &str| parse(s).unwrap().eval(&[Some(2.0); 4]).unwrap();
        assert_eq!(ev("-x^2"), -4.0);
        assert_eq!(ev("2^3^2"), 512.0);
        assert_eq!(ev("8/2/2"), 2.0);
        assert_eq!(ev("1 - 2 - 3"), -4.0);
        assert_eq!(ev("1.5e1 + 2E-1"), 15.2);
        assert_eq!(ev("sqrt(0)"), 0.0);
    }

    #[test]
    fn variable_exponent() {
        let (v, g) = at("x^t", &[(Var::X, 2.0), (Var::T, 3.0)]);
        assert_eq!(v, 8.0);
        assert!((g[0] - 12.0).abs() < 1e-12);
        assert!((g[1] - 8.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn print_then_parse_is_identity() {
        for src in ["x + 2*t", "-x^2", "sin(x*y)/(1 + t^2)", "tanh(-s) - 3.25e-7"] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e);
        }
    }
}
