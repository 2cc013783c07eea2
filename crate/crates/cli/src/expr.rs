//! A small expression language for custom problem data.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Names are the coordinates of the physical domain (`s`, `t` in 2D, also
//! accepted as `s1`, `s2`; `s1`, `s2`, `s3` in 3D), the outward normal
//! components `n1`, `n2`, `n3` where allowed, and the constant `pi`.
//! Functions: `exp`, `ln`, `sin`, `cos`, `sqrt`.

use std::fmt;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sqrt => x.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Index into the evaluation slice.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Which names an expression may use, and the slot each one reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Variables {
    pub dim: usize,
    /// Whether `n1..n{dim}` are in scope (slots `dim..2*dim`).
    pub normals: bool,
}

impl Variables {
    pub fn coordinates(dim: usize) -> Self {
        Self {
            dim,
            normals: false,
        }
    }

    pub fn with_normals(dim: usize) -> Self {
        Self { dim, normals: true }
    }

    fn slot(&self, name: &str) -> Option<usize> {
        let coord = match (self.dim, name) {
            (2, "s") | (_, "s1") => Some(0),
            (2, "t") | (_, "s2") => Some(1),
            (3, "s3") => Some(2),
            _ => None,
        };
        if coord.is_some() {
            return coord;
        }
        if !self.normals {
            return None;
        }
        match name {
            "n1" => Some(self.dim),
            "n2" => Some(self.dim + 1),
            "n3" if self.dim == 3 => Some(self.dim + 2),
            _ => None,
        }
    }
}

impl Expr {
    pub fn parse(text: &str, vars: Variables) -> Result<Self, CliError> {
        let tokens = tokenize(text)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            vars,
            text,
        };
        let e = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => v[*i],
            Expr::Neg(a) => -a.eval(v),
            Expr::Add(a, b) => a.eval(v) + b.eval(v),
            Expr::Sub(a, b) => a.eval(v) - b.eval(v),
            Expr::Mul(a, b) => a.eval(v) * b.eval(v),
            Expr::Div(a, b) => a.eval(v) / b.eval(v),
            Expr::Pow(a, b) => match **b {
                Expr::Const(c) if c.fract() == 0.0 && c.abs() < 64.0 => a.eval(v).powi(c as i32),
                _ => a.eval(v).powf(b.eval(v)),
            },
            Expr::Call(f, a) => f.apply(a.eval(v)),
        }
    }

    fn depends_on(&self, var: usize) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(i) => *i == var,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on(var),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.depends_on(var) || b.depends_on(var),
        }
    }

    /// `∂/∂v_var`, lightly simplified.
    pub fn derivative(&self, var: usize) -> Expr {
        use Expr::*;
        if !self.depends_on(var) {
            return Const(0.0);
        }
        match self {
            Const(_) => Const(0.0),
            Var(i) => Const(if *i == var { 1.0 } else { 0.0 }),
            Neg(a) => neg(a.derivative(var)),
            Add(a, b) => add(a.derivative(var), b.derivative(var)),
            Sub(a, b) => sub(a.derivative(var), b.derivative(var)),
            Mul(a, b) => add(
                mul(a.derivative(var), (**b).clone()),
                mul((**a).clone(), b.derivative(var)),
            ),
            Div(a, b) => div(
                sub(
                    mul(a.derivative(var), (**b).clone()),
                    mul((**a).clone(), b.derivative(var)),
                ),
                pow((**b).clone(), Const(2.0)),
            ),
            Pow(a, b) if !b.depends_on(var) => mul(
                mul(
                    (**b).clone(),
                    pow((**a).clone(), sub((**b).clone(), Const(1.0))),
                ),
                a.derivative(var),
            ),
            Pow(a, b) => mul(
                self.clone(),
                add(
                    mul(b.derivative(var), call(Func::Ln, (**a).clone())),
                    div(mul((**b).clone(), a.derivative(var)), (**a).clone()),
                ),
            ),
            Call(f, a) => {
                let inner = (**a).clone();
                let outer = match f {
                    Func::Exp => call(Func::Exp, inner),
                    Func::Ln => div(Const(1.0), inner),
                    Func::Sin => call(Func::Cos, inner),
                    Func::Cos => neg(call(Func::Sin, inner)),
                    Func::Sqrt => div(Const(0.5), call(Func::Sqrt, inner)),
                };
                mul(outer, a.derivative(var))
            }
        }
    }

    /// `Σ_k ∂²/∂v_k²` over the first `dim` slots.
    pub fn laplacian(&self, dim: usize) -> Expr {
        (0..dim).fold(Expr::Const(0.0), |acc, k| {
            add(acc, self.derivative(k).derivative(k))
        })
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        a => Expr::Neg(Box::new(a)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (Expr::Const(0.0), e) | (e, Expr::Const(0.0)) => e,
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (e, Expr::Const(0.0)) => e,
        (Expr::Const(0.0), e) => neg(e),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (Expr::Const(0.0), _) | (_, Expr::Const(0.0)) => Expr::Const(0.0),
        (Expr::Const(1.0), e) | (e, Expr::Const(1.0)) => e,
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(0.0), _) => Expr::Const(0.0),
        (e, Expr::Const(1.0)) => e,
        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (_, Expr::Const(0.0)) => Expr::Const(1.0),
        (e, Expr::Const(1.0)) => e,
        (a, b) => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "v{i}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Name(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, CliError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
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
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let literal: String = chars[start..i].iter().collect();
            let value = literal
                .parse()
                .map_err(|_| CliError::Expression(format!("bad number '{literal}' in '{text}'")))?;
            tokens.push((Token::Number(value), start));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            tokens.push((Token::Name(chars[start..i].iter().collect()), start));
        } else if "+-*/^()".contains(c) {
            tokens.push((Token::Op(c), i));
            i += 1;
        } else {
            return Err(CliError::Expression(format!(
                "unexpected character '{c}' at position {i} in '{text}'"
            )));
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    vars: Variables,
    text: &'a str,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> CliError {
        let at = self
            .tokens
            .get(self.pos)
            .map(|(_, p)| format!("position {p}"))
            .unwrap_or_else(|| "end of input".into());
        CliError::Expression(format!("{msg} at {at} in '{}'", self.text))
    }

    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some((Token::Op(c), _)) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, op: char) -> Result<(), CliError> {
        if self.peek_op() == Some(op) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{op}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, CliError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, CliError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, CliError> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.peek_op() == Some('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, CliError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, CliError> {
        let Some((token, _)) = self.tokens.get(self.pos).cloned() else {
            return Err(self.error("unexpected end of expression"));
        };
        match token {
            Token::Number(v) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            Token::Op('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Token::Name(name) => {
                if let Some(func) = Func::from_name(&name) {
                    self.pos += 1;
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if name == "pi" {
                    self.pos += 1;
                    return Ok(Expr::Const(std::f64::consts::PI));
                }
                match self.vars.slot(&name) {
                    Some(slot) => {
                        self.pos += 1;
                        Ok(Expr::Var(slot))
                    }
                    None => Err(self.error(&format!("unknown name '{name}'"))),
                }
            }
            Token::Op(_) => Err(self.error("expected a number, name or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p2(text: &str) -> Expr {
        Expr::parse(text, Variables::coordinates(2)).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        let v = [2.0, 3.0];
        assert_eq!(p2("1 + 2 * 3").eval(&v), 7.0);
        assert_eq!(p2("(1 + 2) * 3").eval(&v), 9.0);
        assert_eq!(p2("2 ^ 3 ^ 2").eval(&v), 512.0);
        assert_eq!(p2("-2 ^ 2").eval(&v), -4.0);
        assert_eq!(p2("8 / 4 / 2").eval(&v), 1.0);
        assert_eq!(p2("10 - 4 - 3").eval(&v), 3.0);
        assert_eq!(p2("s * t - s2").eval(&v), 3.0);
        assert_eq!(p2("1.5e2 + 2E-1").eval(&v), 150.2);
    }

    #[test]
    fn functions_and_constants() {
        let e = p2("exp(-s^2) * cos(pi * t)");
        let v = [0.3, 0.7];
        assert!((e.eval(&v) - (-0.09f64).exp() * (0.7 * PI).cos()).abs() < 1e-15);
        assert!((p2("sqrt(s) + ln(t)").eval(&[4.0, 1.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "", "1 +", "s * (t", "foo(s)", "x + 1", "1 $ 2", "sin s", "s3",
        ] {
            assert!(
                Expr::parse(bad, Variables::coordinates(2)).is_err(),
                "{bad}"
            );
        }
        assert!(Expr::parse("n1 * s", Variables::coordinates(2)).is_err());
        assert!(Expr::parse("n1 * s + n2", Variables::with_normals(2)).is_ok());
        assert!(Expr::parse("n3", Variables::with_normals(2)).is_err());
        assert!(Expr::parse("s1 * n3 + s3", Variables::with_normals(3)).is_ok());
        assert!(Expr::parse("t", Variables::coordinates(3)).is_err());
    }

    fn check_derivative(text: &str, at: [f64; 2]) {
        let e = p2(text);
        let h = 1e-6;
        for k in 0..2 {
            let (mut p, mut m) = (at, at);
            p[k] += h;
            m[k] -= h;
            let fd = (e.eval(&p) - e.eval(&m)) / (2.0 * h);
            let exact = e.derivative(k).eval(&at);
            assert!(
                (fd - exact).abs() < 1e-6 * exact.abs().max(1.0),
                "{text} d{k}: {fd} vs {exact}"
            );
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let at = [0.4, 0.9];
        for text in [
            "exp(-s^2) * cos(pi * t)",
            "exp(s - t)",
            "s^3 * t / (1 + s^2)",
            "sqrt(1 + s^2 + t^2)",
            "ln(2 + s * t)",
            "s ^ t",
            "sin(s) * cos(t) - 3",
            "-(s - t)^2",
        ] {
            check_derivative(text, at);
        }
    }

    #[test]
    fn closed_form_laplacian() {
        // Δ(e^{-s²} cos πt) = e^{-s²} cos πt (4s² − 2 − π²)
        let e = p2("exp(-s^2) * cos(pi * t)");
        let lap = e.laplacian(2);
        for v in [[0.1, 0.2], [-0.7, 1.3], [1.2, -0.4]] {
            let u = e.eval(&v);
            let exact = u * (4.0 * v[0] * v[0] - 2.0 - PI * PI);
            assert!((lap.eval(&v) - exact).abs() < 1e-12, "{v:?}");
        }
        let h = Expr::parse("s1 * exp(s2) * sin(s3)", Variables::coordinates(3)).unwrap();
        assert!(h.laplacian(3).eval(&[0.3, -0.2, 1.1]).abs() < 1e-14);
    }

    #[test]
    fn simplification_drops_trivial_terms() {
        assert_eq!(p2("3 * t").derivative(0), Expr::Const(0.0));
        assert_eq!(p2("s").derivative(0), Expr::Const(1.0));
        assert_eq!(p2("2 * s").derivative(0), Expr::Const(2.0));
    }
}
