//! Scalar expressions in the plane variables `x1`, `x2` with named parameters.
//!
//! Field components, pressures and stream functions are written in a small
//! pure-math language and kept as trees, so that every derivative the rest of
//! the crate needs (divergence, vorticity, Laplacian, Euler residual) is exact
//! rather than a finite difference.
//!
//! ```
//! use flowlab::expr::{parse, ParamEnv, Var};
//!
//! let e = parse("sin(a*x1)*sin(b*x2)").unwrap();
//! let env = ParamEnv::from_pairs([("a", 1.0), ("b", 1.0)]).unwrap();
//! assert_eq!(e.eval([0.0, 0.0], &env).unwrap(), 0.0);
//!
//! let d = e.differentiate(Var::X1);
//! assert_eq!(d.to_string(), "a*cos(a*x1)*sin(b*x2)");
//! ```

mod diff;
mod normal;
mod parse;
mod print;
mod simplify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::parse;

/// One of the two plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    X1,
    X2,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X1 => "x1",
            Var::X2 => "x2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl UnaryOp {
    /// Function name as written in source text. `Neg` has no function form.
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Sinh => "sinh",
            UnaryOp::Cosh => "cosh",
            UnaryOp::Tanh => "tanh",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "sinh" => UnaryOp::Sinh,
            "cosh" => UnaryOp::Cosh,
            "tanh" => UnaryOp::Tanh,
            "exp" => UnaryOp::Exp,
            "ln" => UnaryOp::Ln,
            "sqrt" => UnaryOp::Sqrt,
            "abs" => UnaryOp::Abs,
            _ => return None,
        })
    }

    /// Applies the operation, returning `None` outside its real domain.
    pub fn apply(self, a: f64) -> Option<f64> {
        Some(match self {
            UnaryOp::Neg => -a,
            UnaryOp::Sin => a.sin(),
            UnaryOp::Cos => a.cos(),
            UnaryOp::Sinh => a.sinh(),
            UnaryOp::Cosh => a.cosh(),
            UnaryOp::Tanh => a.tanh(),
            UnaryOp::Exp => a.exp(),
            UnaryOp::Ln => {
                if a <= 0.0 {
                    return None;
                }
                a.ln()
            }
            UnaryOp::Sqrt => {
                if a < 0.0 {
                    return None;
                }
                a.sqrt()
            }
            UnaryOp::Abs => a.abs(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }

    /// Applies the operation, returning `None` outside its real domain:
    /// division by zero and a negative base raised to a non-integer power.
    pub fn apply(self, a: f64, b: f64) -> Option<f64> {
        Some(match self {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div => {
                if b == 0.0 {
                    return None;
                }
                a / b
            }
            BinaryOp::Pow => {
                if a < 0.0 && b.fract() != 0.0 {
                    return None;
                }
                if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
                    a.powi(b as i32)
                } else {
                    a.powf(b)
                }
            }
        })
    }
}

/// Expression tree. Trees are immutable values; every transformation
/// returns a new tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Param(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("empty expression")]
    Empty,
    #[error("domain error in `{op}`: argument outside the real domain in `{subtree}`")]
    Domain { op: String, subtree: String },
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("duplicate parameter `{0}`")]
    DuplicateParameter(String),
    #[error("parameter `{name}` has non-finite value {value}")]
    NonFiniteParameter { name: String, value: f64 },
}

/// Named parameter values. Names are unique and values finite.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ParamEnv {
    values: BTreeMap<String, f64>,
}

impl ParamEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Result<Self, ExprError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut env = Self::new();
        for (k, v) in pairs {
            env.insert(k, v)?;
        }
        Ok(env)
    }

    pub fn insert(&mut self, name: impl Into<String>, value: f64) -> Result<(), ExprError> {
        let name = name.into();
        if !value.is_finite() {
            return Err(ExprError::NonFiniteParameter { name, value });
        }
        if self.values.contains_key(&name) {
            return Err(ExprError::DuplicateParameter(name));
        }
        self.values.insert(name, value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Expr {
    pub fn c(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn x1() -> Expr {
        Expr::Var(Var::X1)
    }

    pub fn x2() -> Expr {
        Expr::Var(Var::X2)
    }

    pub fn param(name: impl Into<String>) -> Expr {
        Expr::Param(name.into())
    }

    pub fn unary(op: UnaryOp, a: Expr) -> Expr {
        Expr::Unary(op, Box::new(a))
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        Expr::unary(UnaryOp::Neg, a)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinaryOp::Add, a, b)
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinaryOp::Sub, a, b)
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinaryOp::Mul, a, b)
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinaryOp::Div, a, b)
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinaryOp::Pow, a, b)
    }

    /// Evaluates the tree at `x`. Parameters are looked up in `env`.
    pub fn eval(&self, x: [f64; 2], env: &ParamEnv) -> Result<f64, ExprError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(Var::X1) => Ok(x[0]),
            Expr::Var(Var::X2) => Ok(x[1]),
            Expr::Param(name) => env
                .get(name)
                .ok_or_else(|| ExprError::UnboundParameter(name.clone())),
            Expr::Unary(op, a) => {
                let av = a.eval(x, env)?;
                op.apply(av).ok_or_else(|| ExprError::Domain {
                    op: op.name().to_string(),
                    subtree: self.to_string(),
                })
            }
            Expr::Binary(op, a, b) => {
                let av = a.eval(x, env)?;
                let bv = b.eval(x, env)?;
                op.apply(av, bv).ok_or_else(|| ExprError::Domain {
                    op: op.symbol().to_string(),
                    subtree: self.to_string(),
                })
            }
        }
    }

    /// Evaluates a parameter-free tree. Used on trees produced by [`Expr::bind`].
    pub fn eval_bound(&self, x: [f64; 2]) -> Result<f64, ExprError> {
        self.eval(x, &ParamEnv::default())
    }

    /// Replaces every parameter by its value from `env` and folds constants.
    pub fn bind(&self, env: &ParamEnv) -> Result<Expr, ExprError> {
        Ok(self.bind_raw(env)?.simplify())
    }

    fn bind_raw(&self, env: &ParamEnv) -> Result<Expr, ExprError> {
        Ok(match self {
            Expr::Param(name) => Expr::Const(
                env.get(name)
                    .ok_or_else(|| ExprError::UnboundParameter(name.clone()))?,
            ),
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Unary(op, a) => Expr::unary(*op, a.bind_raw(env)?),
            Expr::Binary(op, a, b) => Expr::binary(*op, a.bind_raw(env)?, b.bind_raw(env)?),
        })
    }

    /// Substitutes both plane variables by the given expressions.
    pub fn substitute(&self, x1: &Expr, x2: &Expr) -> Expr {
        match self {
            Expr::Var(Var::X1) => x1.clone(),
            Expr::Var(Var::X2) => x2.clone(),
            Expr::Const(_) | Expr::Param(_) => self.clone(),
            Expr::Unary(op, a) => Expr::unary(*op, a.substitute(x1, x2)),
            Expr::Binary(op, a, b) => {
                Expr::binary(*op, a.substitute(x1, x2), b.substitute(x1, x2))
            }
        }
    }

    /// Names of all parameters in the tree.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Param(n) => {
                out.insert(n.clone());
            }
            Expr::Const(_) | Expr::Var(_) => {}
            Expr::Unary(_, a) => a.collect_params(out),
            Expr::Binary(_, a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }

    /// Whether the tree mentions the variable `v`.
    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Expr::Var(w) => *w == v,
            Expr::Const(_) | Expr::Param(_) => false,
            Expr::Unary(_, a) => a.depends_on(v),
            Expr::Binary(_, a, b) => a.depends_on(v) || b.depends_on(v),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 1.0)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => 1,
            Expr::Unary(_, a) => 1 + a.size(),
            Expr::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_expr(self, f)
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests;
