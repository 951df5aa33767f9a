//! Exact symbolic differentiation.

use super::{BinaryOp, Expr, UnaryOp, Var};

impl Expr {
    /// Partial derivative with respect to `v`, simplified.
    pub fn differentiate(&self, v: Var) -> Expr {
        d(self, v).simplify()
    }

    /// Laplacian `∂²/∂x1² + ∂²/∂x2²`, simplified.
    pub fn laplacian(&self) -> Expr {
        let xx = self.differentiate(Var::X1).differentiate(Var::X1);
        let yy = self.differentiate(Var::X2).differentiate(Var::X2);
        Expr::add(xx, yy).simplify()
    }
}

fn d(e: &Expr, v: Var) -> Expr {
    if !e.depends_on(v) {
        return Expr::Const(0.0);
    }
    match e {
        Expr::Const(_) | Expr::Param(_) => Expr::Const(0.0),
        Expr::Var(w) => Expr::Const(if *w == v { 1.0 } else { 0.0 }),
        Expr::Unary(op, a) => {
            let a = (**a).clone();
            let da = d(&a, v);
            let outer = match op {
                UnaryOp::Neg => return Expr::neg(da),
                UnaryOp::Sin => Expr::unary(UnaryOp::Cos, a),
                UnaryOp::Cos => Expr::neg(Expr::unary(UnaryOp::Sin, a)),
                UnaryOp::Sinh => Expr::unary(UnaryOp::Cosh, a),
                UnaryOp::Cosh => Expr::unary(UnaryOp::Sinh, a),
                UnaryOp::Tanh => Expr::sub(
                    Expr::c(1.0),
                    Expr::pow(Expr::unary(UnaryOp::Tanh, a), Expr::c(2.0)),
                ),
                UnaryOp::Exp => Expr::unary(UnaryOp::Exp, a),
                UnaryOp::Ln => return Expr::div(da, a),
                UnaryOp::Sqrt => {
                    return Expr::div(da, Expr::mul(Expr::c(2.0), Expr::unary(UnaryOp::Sqrt, a)))
                }
                UnaryOp::Abs => Expr::div(a.clone(), Expr::unary(UnaryOp::Abs, a)),
            };
            Expr::mul(da, outer)
        }
        Expr::Binary(op, a, b) => {
            let (a, b) = ((**a).clone(), (**b).clone());
            let (da, db) = (d(&a, v), d(&b, v));
            match op {
                BinaryOp::Add => Expr::add(da, db),
                BinaryOp::Sub => Expr::sub(da, db),
                BinaryOp::Mul => Expr::add(Expr::mul(da, b), Expr::mul(a, db)),
                BinaryOp::Div => Expr::div(
                    Expr::sub(Expr::mul(da, b.clone()), Expr::mul(a, db)),
                    Expr::pow(b, Expr::c(2.0)),
                ),
                BinaryOp::Pow => {
                    if !b.depends_on(Var::X1) && !b.depends_on(Var::X2) {
                        let lowered = Expr::pow(a, Expr::sub(b.clone(), Expr::c(1.0)));
                        Expr::mul(Expr::mul(b, lowered), da)
                    } else {
                        let log_a = Expr::unary(UnaryOp::Ln, a.clone());
                        let inner = Expr::add(
                            Expr::mul(db, log_a),
                            Expr::div(Expr::mul(b.clone(), da), a.clone()),
                        );
                        Expr::mul(Expr::pow(a, b), inner)
                    }
                }
            }
        }
    }
}
