//! Local rewriting: constant folding and identity elimination.
//!
//! Every rule is evaluation-preserving for finite inputs. Constant folding
//! only fires when the folded value is finite and inside the operation's
//! domain, so a domain error in the source tree stays a domain error.

use super::{BinaryOp, Expr, UnaryOp};

impl Expr {
    /// Bottom-up simplification, repeated until the tree stops changing.
    pub fn simplify(&self) -> Expr {
        let mut cur = simplify_once(self);
        for _ in 0..8 {
            let next = simplify_once(&cur);
            if next == cur {
                break;
            }
            cur = next;
        }
        cur
    }
}

fn simplify_once(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => e.clone(),
        Expr::Unary(op, a) => unary(*op, simplify_once(a)),
        Expr::Binary(op, a, b) => binary(*op, simplify_once(a), simplify_once(b)),
    }
}

fn fold(v: Option<f64>) -> Option<Expr> {
    v.filter(|x| x.is_finite()).map(Expr::Const)
}

fn unary(op: UnaryOp, a: Expr) -> Expr {
    if let Expr::Const(c) = a {
        if let Some(folded) = fold(op.apply(c)) {
            return folded;
        }
    }
    if op == UnaryOp::Neg {
        if let Expr::Unary(UnaryOp::Neg, inner) = a {
            return *inner;
        }
    }
    Expr::unary(op, a)
}

fn binary(op: BinaryOp, a: Expr, b: Expr) -> Expr {
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        if let Some(folded) = fold(op.apply(*x, *y)) {
            return folded;
        }
    }
    match op {
        BinaryOp::Add => {
            if b.is_zero() {
                return a;
            }
            if a.is_zero() {
                return b;
            }
            if let Expr::Unary(UnaryOp::Neg, nb) = &b {
                if **nb == a {
                    return Expr::Const(0.0);
                }
                return Expr::sub(a, (**nb).clone());
            }
            if let Expr::Unary(UnaryOp::Neg, na) = &a {
                if **na == b {
                    return Expr::Const(0.0);
                }
            }
        }
        BinaryOp::Sub => {
            if b.is_zero() {
                return a;
            }
            if a.is_zero() {
                return unary(UnaryOp::Neg, b);
            }
            if a == b {
                return Expr::Const(0.0);
            }
            if let Expr::Unary(UnaryOp::Neg, nb) = &b {
                return Expr::add(a, (**nb).clone());
            }
        }
        BinaryOp::Mul => {
            if a.is_zero() || b.is_zero() {
                return Expr::Const(0.0);
            }
            if a.is_one() {
                return b;
            }
            if b.is_one() {
                return a;
            }
            if matches!(a, Expr::Const(c) if c == -1.0) {
                return unary(UnaryOp::Neg, b);
            }
            if matches!(b, Expr::Const(c) if c == -1.0) {
                return unary(UnaryOp::Neg, a);
            }
            if let (Expr::Unary(UnaryOp::Neg, na), Expr::Unary(UnaryOp::Neg, nb)) = (&a, &b) {
                return Expr::mul((**na).clone(), (**nb).clone());
            }
            if let Expr::Unary(UnaryOp::Neg, na) = &a {
                return unary(UnaryOp::Neg, Expr::mul((**na).clone(), b));
            }
            if let Expr::Unary(UnaryOp::Neg, nb) = &b {
                return unary(UnaryOp::Neg, Expr::mul(a, (**nb).clone()));
            }
        }
        BinaryOp::Div => {
            if b.is_one() {
                return a;
            }
            if let Expr::Unary(UnaryOp::Neg, na) = &a {
                return unary(UnaryOp::Neg, Expr::div((**na).clone(), b));
            }
        }
        BinaryOp::Pow => {
            if b.is_one() {
                return a;
            }
            if b.is_zero() {
                return Expr::Const(1.0);
            }
        }
    }
    Expr::binary(op, a, b)
}
