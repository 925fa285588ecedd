//! Coordinate potentials `V_1, V_2, ...` and a small expression language
//! for writing them down.
//!
//! Grammar: numbers, the variable `y`, `+ - * /`, right associative `^`,
//! unary minus, parentheses and the functions `log` and `exp`.

use std::fmt;
use std::sync::Arc;

use crate::canonical::Domain;
use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Potential {
    pub label: String,
    value: ScalarFn,
    first: Option<ScalarFn>,
    second: Option<ScalarFn>,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Potential({})", self.label)
    }
}

impl Potential {
    /// A potential known only through its values; derivatives fall back to
    /// central differences.
    pub fn from_fn(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            value: Arc::new(f),
            first: None,
            second: None,
        }
    }

    pub fn with_derivatives(
        mut self,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.first = Some(Arc::new(d1));
        self.second = Some(Arc::new(d2));
        self
    }

    pub fn parse(src: &str) -> Result<Self> {
        let e = Expr::parse(src)?;
        let d1 = e.derivative();
        let d2 = d1.derivative();
        Ok(Self {
            label: src.trim().to_string(),
            value: Arc::new(move |y| e.eval(y)),
            first: Some(Arc::new(move |y| d1.eval(y))),
            second: Some(Arc::new(move |y| d2.eval(y))),
        })
    }

    pub fn zero() -> Self {
        Self::from_fn("0", |_| 0.0).with_derivatives(|_| 0.0, |_| 0.0)
    }

    pub fn value(&self, y: f64) -> f64 {
        (self.value)(y)
    }

    pub fn first(&self, y: f64) -> f64 {
        match &self.first {
            Some(d) => d(y),
            None => {
                let h = 1e-5 * y.abs().max(1.0);
                (self.value(y + h) - self.value(y - h)) / (2.0 * h)
            }
        }
    }

    pub fn second(&self, y: f64) -> f64 {
        match &self.second {
            Some(d) => d(y),
            None => {
                let h = 1e-4 * y.abs().max(1.0);
                (self.value(y + h) - 2.0 * self.value(y) + self.value(y - h)) / (h * h)
            }
        }
    }
}

/// `V_1, ..., V_L`. Indices beyond `L` reuse the last two potentials by
/// parity: `V_j = V_{j-2}`.
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    terms: Vec<Potential>,
}

impl PotentialSpec {
    pub fn new(terms: Vec<Potential>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput(
                "at least one potential is required".into(),
            ));
        }
        Ok(Self { terms })
    }

    /// `V_j = 0` for every `j`.
    pub fn zero() -> Self {
        Self {
            terms: vec![Potential::zero(), Potential::zero()],
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, j: usize) -> &Potential {
        let l = self.terms.len();
        let mut i = j;
        while i > l {
            i -= 2;
        }
        if i == 0 {
            i = 1;
        }
        &self.terms[i - 1]
    }

    pub fn labels(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.label.clone()).collect()
    }

    /// Growth needed for the Gibbs densities to be integrable on an
    /// unbounded coordinate: `V_j(y) >= (2 + eps) log|y|`, or `1 + eps` for
    /// the unrestricted diagonal coefficients on the real line. Checked at
    /// `|y| = 1e2, 1e3, 1e4` for `j <= up_to`.
    pub fn check_growth(&self, domain: Domain, up_to: usize) -> Result<()> {
        const EPS: f64 = 0.01;
        if domain == Domain::Interval01 {
            return Ok(());
        }
        for j in 1..=up_to.max(2) {
            let v = self.get(j);
            let (rate, signs): (f64, &[f64]) = match domain {
                Domain::RealLine if j % 2 == 1 => (1.0 + EPS, &[1.0, -1.0]),
                _ => (2.0 + EPS, &[1.0]),
            };
            for s in signs {
                for y in [1e2, 1e3, 1e4] {
                    let val = v.value(s * y);
                    if !(val >= rate * y.ln()) {
                        return Err(Error::NonIntegrable { index: j });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Log(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::InvalidInput(format!("trailing input in `{src}`")));
        }
        Ok(e)
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var => y,
            Expr::Add(a, b) => a.eval(y) + b.eval(y),
            Expr::Sub(a, b) => a.eval(y) - b.eval(y),
            Expr::Mul(a, b) => a.eval(y) * b.eval(y),
            Expr::Div(a, b) => a.eval(y) / b.eval(y),
            Expr::Pow(a, b) => match **b {
                Expr::Const(c) if c.fract() == 0.0 && c.abs() < 64.0 => a.eval(y).powi(c as i32),
                _ => a.eval(y).powf(b.eval(y)),
            },
            Expr::Neg(a) => -a.eval(y),
            Expr::Log(a) => a.eval(y).ln(),
            Expr::Exp(a) => a.eval(y).exp(),
        }
    }

    fn is_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn derivative(&self) -> Expr {
        use Expr::*;
        match self {
            Const(_) => Const(0.0),
            Var => Const(1.0),
            Add(a, b) => add(a.derivative(), b.derivative()),
            Sub(a, b) => sub(a.derivative(), b.derivative()),
            Mul(a, b) => add(
                mul(a.derivative(), (**b).clone()),
                mul((**a).clone(), b.derivative()),
            ),
            Div(a, b) => div(
                sub(
                    mul(a.derivative(), (**b).clone()),
                    mul((**a).clone(), b.derivative()),
                ),
                pow((**b).clone(), Const(2.0)),
            ),
            Pow(a, b) => match b.is_const() {
                Some(c) => mul(
                    mul(Const(c), pow((**a).clone(), Const(c - 1.0))),
                    a.derivative(),
                ),
                None => mul(
                    self.clone(),
                    add(
                        mul(b.derivative(), Log(a.clone())),
                        div(mul((**b).clone(), a.derivative()), (**a).clone()),
                    ),
                ),
            },
            Neg(a) => neg(a.derivative()),
            Log(a) => div(a.derivative(), (**a).clone()),
            Exp(a) => mul(self.clone(), a.derivative()),
        }
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a.is_const(), b.is_const()) {
        (Some(x), Some(y)) => Expr::Const(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a.is_const(), b.is_const()) {
        (Some(x), Some(y)) => Expr::Const(x - y),
        (_, Some(y)) if y == 0.0 => a,
        (Some(x), _) if x == 0.0 => neg(b),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a.is_const(), b.is_const()) {
        (Some(x), Some(y)) => Expr::Const(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::Const(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a.is_const(), b.is_const()) {
        (Some(x), _) if x == 0.0 => Expr::Const(0.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match b.is_const() {
        Some(c) if c == 1.0 => a,
        Some(c) if c == 0.0 => Expr::Const(1.0),
        _ => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a.is_const() {
        Some(x) => Expr::Const(-x),
        None => Expr::Neg(Box::new(a)),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let save = i;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad number `{text}`")))?;
            out.push(Token::Num(v));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::InvalidInput(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::InvalidInput("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Expr::Const(v)),
            Token::Ident(name) => match name.as_str() {
                "y" => Ok(Expr::Var),
                "log" | "exp" => {
                    if !self.eat('(') {
                        return Err(Error::InvalidInput(format!("`{name}` needs parentheses")));
                    }
                    let inner = self.expr()?;
                    if !self.eat(')') {
                        return Err(Error::InvalidInput("missing `)`".into()));
                    }
                    Ok(if name == "log" {
                        Expr::Log(Box::new(inner))
                    } else {
                        Expr::Exp(Box::new(inner))
                    })
                }
                other => Err(Error::InvalidInput(format!("unknown identifier `{other}`"))),
            },
            Token::Op('(') => {
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::InvalidInput("missing `)`".into()));
                }
                Ok(inner)
            }
            Token::Op(c) => Err(Error::InvalidInput(format!("unexpected `{c}`"))),
        }
    }
}
