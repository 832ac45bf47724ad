//! Scalar expression language for config-supplied metric entries and
//! embedding components: parsing, evaluation, symbolic differentiation.
//!
//! Grammar (EBNF, all binary operators left-associative):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := unary ('^' unary)*
//! unary  := '-' unary | atom
//! atom   := number | 'pi' | var | func '(' expr (',' expr)* ')' | '(' expr ')'
//! func   := sin | cos | exp | log | sqrt | pow
//! var    := 'x' digits          (x1 .. xn)
//! ```
//!
//! Unary minus binds tighter than `^`, so `-x1^2` parses as `(-x1)^2`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(usize),
    Neg(Arc<Expr>),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Pow(Arc<Expr>, Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Exp(Arc<Expr>),
    Log(Arc<Expr>),
    Sqrt(Arc<Expr>),
}

impl Expr {
    /// Evaluates at `x` (component i holds the value of `x{i+1}`).
    pub fn eval<T: Real>(&self, x: &[T]) -> Result<T> {
        let v = match self {
            Expr::Num(c) => real(*c),
            Expr::Pi => T::PI(),
            Expr::Var(i) => {
                if *i >= x.len() {
                    return Err(self.eval_error("variable out of range for this point"));
                }
                x[*i]
            }
            Expr::Neg(u) => -u.eval(x)?,
            Expr::Add(u, v) => u.eval(x)? + v.eval(x)?,
            Expr::Sub(u, v) => u.eval(x)? - v.eval(x)?,
            Expr::Mul(u, v) => u.eval(x)? * v.eval(x)?,
            Expr::Div(u, v) => {
                let d = v.eval(x)?;
                if d == T::zero() {
                    return Err(self.eval_error("division by zero"));
                }
                u.eval(x)? / d
            }
            Expr::Pow(u, v) => u.eval(x)?.powf(v.eval(x)?),
            Expr::Sin(u) => u.eval(x)?.sin(),
            Expr::Cos(u) => u.eval(x)?.cos(),
            Expr::Exp(u) => u.eval(x)?.exp(),
            Expr::Log(u) => {
                let a = u.eval(x)?;
                if a <= T::zero() {
                    return Err(self.eval_error("log of a non-positive value"));
                }
                a.ln()
            }
            Expr::Sqrt(u) => {
                let a = u.eval(x)?;
                if a < T::zero() {
                    return Err(self.eval_error("sqrt of a negative value"));
                }
                a.sqrt()
            }
        };
        if v.is_nan() {
            return Err(self.eval_error("result is not a number"));
        }
        Ok(v)
    }

    fn eval_error(&self, message: &str) -> Error {
        Error::ExprEval { subexpr: self.to_string(), message: message.to_string() }
    }

    /// Symbolic partial derivative with respect to variable index `var`
    /// (0-based). Performs constant folding of literal arithmetic but no
    /// further simplification.
    pub fn differentiate(&self, var: usize) -> Expr {
        match self {
            Expr::Num(_) | Expr::Pi => num(0.0),
            Expr::Var(i) => num(if *i == var { 1.0 } else { 0.0 }),
            Expr::Neg(u) => neg(u.differentiate(var)),
            Expr::Add(u, v) => add(u.differentiate(var), v.differentiate(var)),
            Expr::Sub(u, v) => sub(u.differentiate(var), v.differentiate(var)),
            Expr::Mul(u, v) => add(
                mul(u.differentiate(var), (**v).clone()),
                mul((**u).clone(), v.differentiate(var)),
            ),
            Expr::Div(u, v) => div(
                sub(
                    mul(u.differentiate(var), (**v).clone()),
                    mul((**u).clone(), v.differentiate(var)),
                ),
                mul((**v).clone(), (**v).clone()),
            ),
            Expr::Pow(u, v) => {
                if let Expr::Num(c) = **v {
                    // d(u^c) = c * u^(c-1) * u'
                    mul(
                        mul(num(c), pow((**u).clone(), num(c - 1.0))),
                        u.differentiate(var),
                    )
                } else {
                    // d(u^v) = u^v * (v' log u + v u' / u)
                    mul(
                        pow((**u).clone(), (**v).clone()),
                        add(
                            mul(v.differentiate(var), log((**u).clone())),
                            div(mul((**v).clone(), u.differentiate(var)), (**u).clone()),
                        ),
                    )
                }
            }
            Expr::Sin(u) => mul(cos((**u).clone()), u.differentiate(var)),
            Expr::Cos(u) => neg(mul(sin((**u).clone()), u.differentiate(var))),
            Expr::Exp(u) => mul(exp((**u).clone()), u.differentiate(var)),
            Expr::Log(u) => div(u.differentiate(var), (**u).clone()),
            Expr::Sqrt(u) => div(
                u.differentiate(var),
                mul(num(2.0), sqrt((**u).clone())),
            ),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Pow(..) => 3,
            Expr::Neg(..) => 4,
            _ => 5,
        }
    }
}

// Smart constructors: fold literal arithmetic and identity elements so
// symbolic derivatives stay readable. No other rewriting.

pub(crate) fn num(v: f64) -> Expr {
    Expr::Num(v)
}

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Num(v) if *v == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Num(v) if *v == 1.0)
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (_, _) if is_zero(&a) => b,
        (_, _) if is_zero(&b) => a,
        (Expr::Num(x), Expr::Num(y)) if (x + y).is_finite() => Expr::Num(x + y),
        _ => Expr::Add(Arc::new(a), Arc::new(b)),
    }
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (_, _) if is_zero(&b) => a,
        (_, _) if is_zero(&a) => neg(b),
        (Expr::Num(x), Expr::Num(y)) if (x - y).is_finite() => Expr::Num(x - y),
        _ => Expr::Sub(Arc::new(a), Arc::new(b)),
    }
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (_, _) if is_zero(&a) || is_zero(&b) => num(0.0),
        (_, _) if is_one(&a) => b,
        (_, _) if is_one(&b) => a,
        (Expr::Num(x), Expr::Num(y)) if (x * y).is_finite() => Expr::Num(x * y),
        _ => Expr::Mul(Arc::new(a), Arc::new(b)),
    }
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (_, _) if is_one(&b) => a,
        (Expr::Num(x), Expr::Num(y)) if *y != 0.0 && (x / y).is_finite() => Expr::Num(x / y),
        _ => Expr::Div(Arc::new(a), Arc::new(b)),
    }
}

pub(crate) fn pow(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (_, _) if is_one(&b) => a,
        _ => Expr::Pow(Arc::new(a), Arc::new(b)),
    }
}

pub(crate) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(v) => Expr::Num(-v),
        other => Expr::Neg(Arc::new(other)),
    }
}

pub(crate) fn sin(a: Expr) -> Expr {
    Expr::Sin(Arc::new(a))
}

pub(crate) fn cos(a: Expr) -> Expr {
    Expr::Cos(Arc::new(a))
}

pub(crate) fn exp(a: Expr) -> Expr {
    Expr::Exp(Arc::new(a))
}

pub(crate) fn log(a: Expr) -> Expr {
    Expr::Log(Arc::new(a))
}

pub(crate) fn sqrt(a: Expr) -> Expr {
    Expr::Sqrt(Arc::new(a))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Left child needs parentheses below the parent's precedence, right
        // child at or below it (binary operators are left-associative).
        fn side(f: &mut fmt::Formatter<'_>, e: &Expr, parent: u8, right: bool) -> fmt::Result {
            let p = e.precedence();
            if p < parent || (right && p == parent) {
                write!(f, "(")?;
                write!(f, "{e}")?;
                write!(f, ")")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Pi => write!(f, "pi"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(u) => {
                write!(f, "-")?;
                side(f, u, 4, false)
            }
            Expr::Add(a, b) => {
                side(f, a, 1, false)?;
                write!(f, " + ")?;
                side(f, b, 1, true)
            }
            Expr::Sub(a, b) => {
                side(f, a, 1, false)?;
                write!(f, " - ")?;
                side(f, b, 1, true)
            }
            Expr::Mul(a, b) => {
                side(f, a, 2, false)?;
                write!(f, "*")?;
                side(f, b, 2, true)
            }
            Expr::Div(a, b) => {
                side(f, a, 2, false)?;
                write!(f, "/")?;
                side(f, b, 2, true)
            }
            Expr::Pow(a, b) => {
                side(f, a, 3, false)?;
                write!(f, "^")?;
                side(f, b, 3, true)
            }
            Expr::Sin(u) => write!(f, "sin({u})"),
            Expr::Cos(u) => write!(f, "cos({u})"),
            Expr::Exp(u) => write!(f, "exp({u})"),
            Expr::Log(u) => write!(f, "log({u})"),
            Expr::Sqrt(u) => write!(f, "sqrt({u})"),
        }
    }
}

/// Parses `text` as an expression in variables `x1..x{n_vars}`.
pub fn parse(text: &str, n_vars: usize) -> Result<Expr> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens: &tokens, pos: 0, n_vars };
    let e = p.expr()?;
    match p.peek() {
        Token::End => Ok(e),
        _ => Err(p.error("unexpected trailing input")),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
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
    End,
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' | '-' | '*' | '/' | '^' | '(' | ')' | ',' => {
                let t = match c {
                    '+' => Token::Plus,
                    '-' => Token::Minus,
                    '*' => Token::Star,
                    '/' => Token::Slash,
                    '^' => Token::Caret,
                    '(' => Token::LParen,
                    ')' => Token::RParen,
                    _ => Token::Comma,
                };
                out.push((t, i));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lexeme = &text[start..i];
                let v: f64 = lexeme.parse().map_err(|_| Error::ExprParse {
                    pos: start,
                    message: format!("invalid number `{lexeme}`"),
                })?;
                out.push((Token::Num(v), start));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                out.push((Token::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(Error::ExprParse {
                    pos: i,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    out.push((Token::End, bytes.len()));
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(Token, usize)],
    pos: usize,
    n_vars: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn here(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: &str) -> Error {
        Error::ExprParse { pos: self.here(), message: message.to_string() }
    }

    fn expect(&mut self, t: Token, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump();
                    e = Expr::Add(Arc::new(e), Arc::new(self.term()?));
                }
                Token::Minus => {
                    self.bump();
                    e = Expr::Sub(Arc::new(e), Arc::new(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.factor()?;
        loop {
            match self.peek() {
                Token::Star => {
                    self.bump();
                    e = Expr::Mul(Arc::new(e), Arc::new(self.factor()?));
                }
                Token::Slash => {
                    self.bump();
                    e = Expr::Div(Arc::new(e), Arc::new(self.factor()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        while *self.peek() == Token::Caret {
            self.bump();
            e = Expr::Pow(Arc::new(e), Arc::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Token::Minus {
            self.bump();
            let inner = self.unary()?;
            // Fold a negated literal so printing round-trips structurally.
            return Ok(match inner {
                Expr::Num(v) => Expr::Num(-v),
                other => Expr::Neg(Arc::new(other)),
            });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = self.here();
        match self.bump() {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::LParen => {
                let e = self.expr()?;
                self.expect(Token::RParen, "expected `)`")?;
                Ok(e)
            }
            Token::Ident(name) => self.ident(name, start),
            _ => Err(Error::ExprParse { pos: start, message: "expected an operand".to_string() }),
        }
    }

    fn ident(&mut self, name: String, start: usize) -> Result<Expr> {
        match name.as_str() {
            "pi" => return Ok(Expr::Pi),
            "sin" | "cos" | "exp" | "log" | "sqrt" => {
                let args = self.args(&name, start)?;
                if args.len() != 1 {
                    return Err(Error::ExprParse {
                        pos: start,
                        message: format!("`{name}` takes 1 argument, got {}", args.len()),
                    });
                }
                let u = Arc::new(args.into_iter().next().unwrap());
                return Ok(match name.as_str() {
                    "sin" => Expr::Sin(u),
                    "cos" => Expr::Cos(u),
                    "exp" => Expr::Exp(u),
                    "log" => Expr::Log(u),
                    _ => Expr::Sqrt(u),
                });
            }
            "pow" => {
                let mut args = self.args("pow", start)?;
                if args.len() != 2 {
                    return Err(Error::ExprParse {
                        pos: start,
                        message: format!("`pow` takes 2 arguments, got {}", args.len()),
                    });
                }
                let b = args.pop().unwrap();
                let a = args.pop().unwrap();
                return Ok(Expr::Pow(Arc::new(a), Arc::new(b)));
            }
            _ => {}
        }
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let idx: usize = rest.parse().map_err(|_| Error::ExprParse {
                    pos: start,
                    message: format!("unknown identifier `{name}`"),
                })?;
                if idx >= 1 && idx <= self.n_vars {
                    return Ok(Expr::Var(idx - 1));
                }
                return Err(Error::ExprParse {
                    pos: start,
                    message: format!(
                        "unknown identifier `{name}` (variables are x1..x{})",
                        self.n_vars
                    ),
                });
            }
        }
        Err(Error::ExprParse { pos: start, message: format!("unknown identifier `{name}`") })
    }

    fn args(&mut self, name: &str, start: usize) -> Result<Vec<Expr>> {
        if *self.peek() != Token::LParen {
            return Err(Error::ExprParse {
                pos: start,
                message: format!("`{name}` must be called as {name}(...)"),
            });
        }
        self.bump();
        let mut out = vec![self.expr()?];
        while *self.peek() == Token::Comma {
            self.bump();
            out.push(self.expr()?);
        }
        self.expect(Token::RParen, "expected `)`")?;
        Ok(out)
    }
}
