//! A small expression language for the data of a problem instance:
//! `σ(y)`, `k(x, y)`, `g(y)` and exact solutions.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right associative
//! primary := number | 'x' | 'y' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func    := abs | log | sin | cos | sqrt | sgn | exp
//! ```

mod parser;

use std::fmt;

use crate::error::{Error, Result};

pub use parser::parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Log,
    Sin,
    Cos,
    Sqrt,
    Sgn,
    Exp,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Sgn => "sgn",
            Func::Exp => "exp",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "abs" => Func::Abs,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "sgn" => Func::Sgn,
            "exp" => Func::Exp,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Pi,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Self {
        Expr::Num(v)
    }

    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(f: Func, arg: Expr) -> Self {
        Expr::Call(f, Box::new(arg))
    }

    /// True if the expression is the literal zero.
    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 0.0)
    }

    /// Evaluates at `(x, y)`. Domain violations are errors naming the
    /// offending subexpression.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var(Var::X) => Ok(x),
            Expr::Var(Var::Y) => Ok(y),
            Expr::Pi => Ok(std::f64::consts::PI),
            Expr::Neg(e) => Ok(-e.eval(x, y)?),
            Expr::Bin(op, l, r) => {
                let a = l.eval(x, y)?;
                let b = r.eval(x, y)?;
                match op {
                    BinOp::Add => Ok(a + b),
                    BinOp::Sub => Ok(a - b),
                    BinOp::Mul => Ok(a * b),
                    BinOp::Div => {
                        if b == 0.0 {
                            Err(self.domain("division by zero"))
                        } else {
                            Ok(a / b)
                        }
                    }
                    BinOp::Pow => {
                        power(a, b).ok_or_else(|| self.domain(&format!("fractional power {b} of negative base {a}")))
                    }
                }
            }
            Expr::Call(f, arg) => {
                let v = arg.eval(x, y)?;
                match f {
                    Func::Abs => Ok(v.abs()),
                    Func::Log => {
                        if v > 0.0 {
                            Ok(v.ln())
                        } else {
                            Err(self.domain(&format!("log of non-positive value {v}")))
                        }
                    }
                    Func::Sin => Ok(v.sin()),
                    Func::Cos => Ok(v.cos()),
                    Func::Sqrt => {
                        if v >= 0.0 {
                            Ok(v.sqrt())
                        } else {
                            Err(self.domain(&format!("sqrt of negative value {v}")))
                        }
                    }
                    Func::Sgn => Ok(if v > 0.0 {
                        1.0
                    } else if v < 0.0 {
                        -1.0
                    } else {
                        0.0
                    }),
                    Func::Exp => Ok(v.exp()),
                }
            }
        }
    }

    /// Evaluates a function of the single variable `y`.
    pub fn eval_y(&self, y: f64) -> Result<f64> {
        self.eval(y, y)
    }

    fn domain(&self, message: &str) -> Error {
        Error::Eval {
            expr: self.to_string(),
            message: message.to_string(),
        }
    }
}

fn power(base: f64, exponent: f64) -> Option<f64> {
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        return Some(base.powi(exponent as i32));
    }
    if base < 0.0 {
        return None;
    }
    Some(base.powf(exponent))
}

impl fmt::Display for Expr {
    /// Fully parenthesised form; it re-parses to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::Y) => f.write_str("y"),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, l, r) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({l} {sym} {r})")
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}
