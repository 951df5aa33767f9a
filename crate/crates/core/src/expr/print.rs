//! Canonical printing with minimal, precedence-aware parentheses and an
//! explicit `*`. The output parses back to the same tree.

use std::fmt;

use super::{BinaryOp, Expr, UnaryOp};

const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Const(c) if c.is_sign_negative() => NEG,
        Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => ATOM,
        Expr::Unary(UnaryOp::Neg, _) => NEG,
        Expr::Unary(_, _) => ATOM,
        Expr::Binary(BinaryOp::Add | BinaryOp::Sub, _, _) => ADD,
        Expr::Binary(BinaryOp::Mul | BinaryOp::Div, _, _) => MUL,
        Expr::Binary(BinaryOp::Pow, _, _) => POW,
    }
}

fn wrapped(e: &Expr, parens: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if parens {
        f.write_str("(")?;
        write_expr(e, f)?;
        f.write_str(")")
    } else {
        write_expr(e, f)
    }
}

pub(super) fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Const(c) => write!(f, "{c}"),
        Expr::Var(v) => f.write_str(v.name()),
        Expr::Param(p) => f.write_str(p),
        Expr::Unary(UnaryOp::Neg, a) => {
            f.write_str("-")?;
            // A bare literal after `-` would be folded into a negative
            // constant by the parser, so it is parenthesized.
            let parens = prec(a) < NEG || matches!(**a, Expr::Const(_));
            wrapped(a, parens, f)
        }
        Expr::Unary(op, a) => {
            write!(f, "{}(", op.name())?;
            write_expr(a, f)?;
            f.write_str(")")
        }
        Expr::Binary(op, a, b) => {
            let (lp, rp) = match op {
                BinaryOp::Add | BinaryOp::Sub => (prec(a) < ADD, prec(b) <= ADD),
                BinaryOp::Mul | BinaryOp::Div => (prec(a) < MUL, prec(b) <= MUL),
                BinaryOp::Pow => (prec(a) <= POW, prec(b) < NEG),
            };
            wrapped(a, lp, f)?;
            write!(f, "{}", op.symbol())?;
            wrapped(b, rp, f)
        }
    }
}
