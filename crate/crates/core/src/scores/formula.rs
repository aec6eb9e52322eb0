//! Expression trees for the score formulas in the registry data file.
//!
//! The trees document each score and give an evaluation route independent of
//! the hand-written evaluators; they are evaluated in floating point.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Sqrt(Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Tp,
    Tn,
    Fp,
    Fn,
    P,
    N,
    Beta,
}

#[derive(Debug, Clone, Copy)]
pub struct Env {
    pub tp: f64,
    pub tn: f64,
    pub p: f64,
    pub n: f64,
    pub beta: f64,
}

impl Expr {
    /// `None` when a denominator vanishes or a root is taken of a negative.
    pub fn eval(&self, env: &Env) -> Option<f64> {
        Some(match self {
            Expr::Const(c) => *c,
            Expr::Var(v) => match v {
                Var::Tp => env.tp,
                Var::Tn => env.tn,
                Var::Fp => env.n - env.tn,
                Var::Fn => env.p - env.tp,
                Var::P => env.p,
                Var::N => env.n,
                Var::Beta => env.beta,
            },
            Expr::Neg(a) => -a.eval(env)?,
            Expr::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Expr::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Expr::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Expr::Div(a, b) => {
                let d = b.eval(env)?;
                if d == 0.0 {
                    return None;
                }
                a.eval(env)? / d
            }
            Expr::Sqrt(a) => {
                let v = a.eval(env)?;
                if v < 0.0 {
                    return None;
                }
                v.sqrt()
            }
        })
    }

    pub fn parse(text: &str) -> Result<Expr> {
        let tokens = tokenize(text)?;
        let mut parser = Parser { tokens, pos: 0 };
        let expr = parser.sum()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse(format!("trailing input in formula '{text}'")));
        }
        Ok(expr)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => write!(
                f,
                "{}",
                match v {
                    Var::Tp => "tp",
                    Var::Tn => "tn",
                    Var::Fp => "fp",
                    Var::Fn => "fn",
                    Var::P => "p",
                    Var::N => "n",
                    Var::Beta => "beta",
                }
            ),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
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
            let s: String = chars[start..i].iter().collect();
            let v = s
                .parse()
                .map_err(|_| Error::Parse(format!("bad number '{s}' in formula")))?;
            out.push(Token::Num(v));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected '{c}' in formula '{text}'")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expect_op(&mut self, op: char) -> Result<()> {
        if self.peek_op() == Some(op) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{op}' in formula")))
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.product()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
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

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of formula".into()))?;
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Expr::Const(v)),
            Token::Op('(') => {
                let e = self.sum()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Token::Ident(name) => {
                let var = match name.as_str() {
                    "tp" => Var::Tp,
                    "tn" => Var::Tn,
                    "fp" => Var::Fp,
                    "fn" => Var::Fn,
                    "p" => Var::P,
                    "n" => Var::N,
                    "beta" => Var::Beta,
                    "sqrt" => {
                        self.expect_op('(')?;
                        let e = self.sum()?;
                        self.expect_op(')')?;
                        return Ok(Expr::Sqrt(Box::new(e)));
                    }
                    other => return Err(Error::Parse(format!("unknown symbol '{other}' in formula"))),
                };
                Ok(Expr::Var(var))
            }
            Token::Op(c) => Err(Error::Parse(format!("unexpected '{c}' in formula"))),
        }
    }
}
