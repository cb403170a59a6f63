//! Closed-form expressions in one variable `x` with symbolic differentiation.
//!
//! Grammar (usual precedence, `^` right-associative and binding tighter than
//! unary minus):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func  := cosh | sinh | tanh | exp | ln
//! ```

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Cosh,
    Sinh,
    Tanh,
    Exp,
    Ln,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "cosh" => Func::Cosh,
            "sinh" => Func::Sinh,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Cosh => "cosh",
            Func::Sinh => "sinh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Ln => "ln",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Cosh => v.cosh(),
            Func::Sinh => v.sinh(),
            Func::Tanh => v.tanh(),
            Func::Exp => v.exp(),
            Func::Ln => v.ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(source: &str) -> Result<Expr> {
        let tokens = tokenize(source)?;
        let mut parser = Parser { tokens, pos: 0 };
        let expr = parser.expr()?;
        match parser.peek() {
            None => Ok(expr),
            Some((col, tok)) => Err(Error::Expression {
                column: col,
                message: format!("unexpected {tok:?}"),
            }),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Neg(e) => -e.eval(x),
            Expr::Add(l, r) => l.eval(x) + r.eval(x),
            Expr::Sub(l, r) => l.eval(x) - r.eval(x),
            Expr::Mul(l, r) => l.eval(x) * r.eval(x),
            Expr::Div(l, r) => l.eval(x) / r.eval(x),
            Expr::Pow(l, r) => pow(l.eval(x), r.eval(x)),
            Expr::Call(f, e) => f.apply(e.eval(x)),
        }
    }

    /// True when the expression does not mention `x`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::X => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.is_constant(),
            Expr::Add(l, r)
            | Expr::Sub(l, r)
            | Expr::Mul(l, r)
            | Expr::Div(l, r)
            | Expr::Pow(l, r) => l.is_constant() && r.is_constant(),
        }
    }

    /// Symbolic derivative with respect to `x`.
    pub fn derivative(&self) -> Expr {
        use Expr::*;
        match self {
            Num(_) => Num(0.0),
            X => Num(1.0),
            Neg(e) => neg(e.derivative()),
            Add(l, r) => add(l.derivative(), r.derivative()),
            Sub(l, r) => sub(l.derivative(), r.derivative()),
            Mul(l, r) => add(
                mul(l.derivative(), (**r).clone()),
                mul((**l).clone(), r.derivative()),
            ),
            Div(l, r) => div(
                sub(
                    mul(l.derivative(), (**r).clone()),
                    mul((**l).clone(), r.derivative()),
                ),
                pow_expr((**r).clone(), Num(2.0)),
            ),
            Pow(base, exponent) => {
                if exponent.is_constant() {
                    // n u^(n-1) u'
                    let reduced = sub((**exponent).clone(), Num(1.0));
                    mul(
                        mul((**exponent).clone(), pow_expr((**base).clone(), reduced)),
                        base.derivative(),
                    )
                } else {
                    // u^v (v' ln u + v u'/u)
                    let inner = add(
                        mul(exponent.derivative(), call(Func::Ln, (**base).clone())),
                        div(mul((**exponent).clone(), base.derivative()), (**base).clone()),
                    );
                    mul(self.clone(), inner)
                }
            }
            Call(f, arg) => {
                let outer = match f {
                    Func::Cosh => call(Func::Sinh, (**arg).clone()),
                    Func::Sinh => call(Func::Cosh, (**arg).clone()),
                    Func::Tanh => sub(
                        Num(1.0),
                        pow_expr(call(Func::Tanh, (**arg).clone()), Num(2.0)),
                    ),
                    Func::Exp => call(Func::Exp, (**arg).clone()),
                    Func::Ln => div(Num(1.0), (**arg).clone()),
                };
                mul(outer, arg.derivative())
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::X => write!(f, "x"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(l, r) => write!(f, "({l} + {r})"),
            Expr::Sub(l, r) => write!(f, "({l} - {r})"),
            Expr::Mul(l, r) => write!(f, "({l} * {r})"),
            Expr::Div(l, r) => write!(f, "({l} / {r})"),
            Expr::Pow(l, r) => write!(f, "({l} ^ {r})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

fn pow(base: f64, exponent: f64) -> f64 {
    if exponent == 2.0 {
        base * base
    } else if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        base.powi(exponent as i32)
    } else {
        base.powf(exponent)
    }
}

fn num(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        _ => None,
    }
}

fn neg(e: Expr) -> Expr {
    match e {
        Expr::Num(v) => Expr::Num(-v),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn add(l: Expr, r: Expr) -> Expr {
    match (num(&l), num(&r)) {
        (Some(a), Some(b)) => Expr::Num(a + b),
        (Some(a), _) if a == 0.0 => r,
        (_, Some(b)) if b == 0.0 => l,
        _ => Expr::Add(Box::new(l), Box::new(r)),
    }
}

fn sub(l: Expr, r: Expr) -> Expr {
    match (num(&l), num(&r)) {
        (Some(a), Some(b)) => Expr::Num(a - b),
        (Some(a), _) if a == 0.0 => neg(r),
        (_, Some(b)) if b == 0.0 => l,
        _ => Expr::Sub(Box::new(l), Box::new(r)),
    }
}

fn mul(l: Expr, r: Expr) -> Expr {
    match (num(&l), num(&r)) {
        (Some(a), Some(b)) => Expr::Num(a * b),
        (Some(a), _) | (_, Some(a)) if a == 0.0 => Expr::Num(0.0),
        (Some(a), _) if a == 1.0 => r,
        (_, Some(b)) if b == 1.0 => l,
        _ => Expr::Mul(Box::new(l), Box::new(r)),
    }
}

fn div(l: Expr, r: Expr) -> Expr {
    match (num(&l), num(&r)) {
        (Some(a), Some(b)) if b != 0.0 => Expr::Num(a / b),
        (Some(a), _) if a == 0.0 => Expr::Num(0.0),
        (_, Some(b)) if b == 1.0 => l,
        _ => Expr::Div(Box::new(l), Box::new(r)),
    }
}

fn pow_expr(base: Expr, exponent: Expr) -> Expr {
    match (num(&base), num(&exponent)) {
        (Some(a), Some(b)) => Expr::Num(pow(a, b)),
        (_, Some(b)) if b == 0.0 => Expr::Num(1.0),
        (_, Some(b)) if b == 1.0 => base,
        _ => Expr::Pow(Box::new(base), Box::new(exponent)),
    }
}

fn call(f: Func, arg: Expr) -> Expr {
    match num(&arg) {
        Some(v) => Expr::Num(f.apply(v)),
        None => Expr::Call(f, Box::new(arg)),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(source: &str) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part, e.g. 1.5e-3
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
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| Error::Expression {
                column,
                message: format!("malformed number `{text}`"),
            })?;
            out.push((column, Token::Num(value)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((column, Token::Ident(chars[start..i].iter().collect())));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Token::Op(c),
                '(' => Token::LParen,
                ')' => Token::RParen,
                _ => {
                    return Err(Error::Expression {
                        column,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            out.push((column, tok));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, &Token)> {
        self.tokens.get(self.pos).map(|(c, t)| (*c, t))
    }

    fn end_column(&self) -> usize {
        self.tokens.last().map_or(1, |(c, _)| c + 1)
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some((_, Token::Op(c))) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat_op(&['+']).is_some() {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat_op(&['^']).is_some() {
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some((column, tok)) = self.peek() else {
            return Err(Error::Expression {
                column: self.end_column(),
                message: "unexpected end of expression".into(),
            });
        };
        let tok = tok.clone();
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Token::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::X),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                _ => {
                    let func = Func::from_name(&name).ok_or_else(|| Error::Expression {
                        column,
                        message: format!("unknown identifier `{name}`"),
                    })?;
                    match self.peek() {
                        Some((_, Token::LParen)) => self.pos += 1,
                        _ => {
                            return Err(Error::Expression {
                                column,
                                message: format!("`{name}` must be followed by `(`"),
                            })
                        }
                    }
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Expr::Call(func, Box::new(arg)))
                }
            },
            other => Err(Error::Expression {
                column,
                message: format!("unexpected {other:?}"),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.peek() {
            Some((_, Token::RParen)) => {
                self.pos += 1;
                Ok(())
            }
            Some((column, tok)) => Err(Error::Expression {
                column,
                message: format!("expected `)`, found {tok:?}"),
            }),
            None => Err(Error::Expression {
                column: self.end_column(),
                message: "missing `)`".into(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central(e: &Expr, x: f64, h: f64) -> f64 {
        (e.eval(x + h) - e.eval(x - h)) / (2.0 * h)
    }

    #[test]
    fn precedence() {
        let e = Expr::parse("1 + 2*x^2 - -3").unwrap();
        assert_eq!(e.eval(2.0), 1.0 + 8.0 + 3.0);
        let e = Expr::parse("-x^2").unwrap();
        assert_eq!(e.eval(3.0), -9.0);
        let e = Expr::parse("2^3^2").unwrap();
        assert_eq!(e.eval(0.0), 512.0);
        let e = Expr::parse("1.5e-1*x").unwrap();
        assert!((e.eval(2.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn functions() {
        let e = Expr::parse("cosh(x) + sinh(2*x) - tanh(x)/exp(x) + ln(x)").unwrap();
        let x: f64 = 0.7;
        let expected = x.cosh() + (2.0 * x).sinh() - x.tanh() / x.exp() + x.ln();
        assert!((e.eval(x) - expected).abs() < 1e-14);
        let e = Expr::parse("pi * x").unwrap();
        assert!((e.eval(1.0) - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let sources = [
            "cosh(0.8*x)^2",
            "x^3 - 2*x + 1",
            "exp(-x^2/2) * sinh(x)",
            "ln(2 + tanh(x))",
            "(1 + x^2)^(-0.5)",
            "x^x",
            "1/cosh(x)",
        ];
        for src in sources {
            let e = Expr::parse(src).unwrap();
            let d1 = e.derivative();
            let d2 = d1.derivative();
            for &x in &[0.3, 0.9, 1.7] {
                let h = 1e-4;
                let fd1 = central(&e, x, h);
                let fd2 = (e.eval(x + h) - 2.0 * e.eval(x) + e.eval(x - h)) / (h * h);
                assert!((d1.eval(x) - fd1).abs() < 1e-6 * (1.0 + fd1.abs()), "{src} d1");
                assert!((d2.eval(x) - fd2).abs() < 1e-4 * (1.0 + fd2.abs()), "{src} d2");
            }
        }
    }

    #[test]
    fn constant_folding() {
        let e = Expr::parse("3*x").unwrap();
        assert_eq!(e.derivative(), Expr::Num(3.0));
        assert_eq!(e.derivative().derivative(), Expr::Num(0.0));
    }

    #[test]
    fn errors_report_columns() {
        match Expr::parse("cosh(x") {
            Err(Error::Expression { column, .. }) => assert_eq!(column, 7),
            other => panic!("{other:?}"),
        }
        match Expr::parse("2 * y") {
            Err(Error::Expression { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        assert!(Expr::parse("2 $ x").is_err());
        assert!(Expr::parse("sqrt(x)").is_err());
        assert!(Expr::parse("x x").is_err());
        assert!(Expr::parse("").is_err());
    }
}
