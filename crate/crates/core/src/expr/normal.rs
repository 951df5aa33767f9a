//! Expand-and-collect normal form.
//!
//! Sums, products, negations and small integer powers are multiplied out
//! into a sum of monomials over "atoms" (variables, parameters, function
//! applications and non-polynomial powers, each normalized recursively).
//! Like monomials are merged and exact zeros dropped. This is enough to
//! recognise identities such as `∂₁∂₂u − ∂₂∂₁u = 0`; it is not a general
//! simplifier.

use std::collections::BTreeMap;

use super::{BinaryOp, Expr, UnaryOp};

type Monomial = Vec<(String, i32)>;

#[derive(Debug, Clone, Default)]
struct Poly {
    terms: BTreeMap<Monomial, f64>,
    atoms: BTreeMap<String, Expr>,
}

impl Poly {
    fn constant(c: f64) -> Poly {
        let mut p = Poly::default();
        if c != 0.0 {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    fn atom(e: Expr) -> Poly {
        let key = e.to_string();
        let mut p = Poly::default();
        p.terms.insert(vec![(key.clone(), 1)], 1.0);
        p.atoms.insert(key, e);
        p
    }

    fn as_constant(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => self.terms.get(&Vec::new()).copied(),
            _ => None,
        }
    }

    fn merge_atoms(&mut self, other: &Poly) {
        for (k, v) in &other.atoms {
            self.atoms.entry(k.clone()).or_insert_with(|| v.clone());
        }
    }

    fn add_term(&mut self, m: Monomial, c: f64) {
        let entry = self.terms.entry(m).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.retain(|_, v| *v != 0.0);
        }
    }

    fn add(mut self, other: &Poly, sign: f64) -> Poly {
        self.merge_atoms(other);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), sign * c);
        }
        self
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        out.merge_atoms(self);
        out.merge_atoms(other);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut powers: BTreeMap<String, i32> = ma.iter().cloned().collect();
                for (k, p) in mb {
                    *powers.entry(k.clone()).or_insert(0) += p;
                }
                let m: Monomial = powers.into_iter().filter(|(_, p)| *p != 0).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    fn to_expr(&self) -> Expr {
        let mut sum: Option<Expr> = None;
        for (m, c) in &self.terms {
            let mut num: Option<Expr> = None;
            let mut den: Option<Expr> = None;
            for (k, p) in m {
                let atom = self.atoms[k].clone();
                let factor = if p.abs() == 1 {
                    atom
                } else {
                    Expr::pow(atom, Expr::c(p.abs() as f64))
                };
                let slot = if *p > 0 { &mut num } else { &mut den };
                *slot = Some(match slot.take() {
                    Some(prev) => Expr::mul(prev, factor),
                    None => factor,
                });
            }
            let mut term = match num {
                Some(n) if c.abs() == 1.0 => n,
                Some(n) => Expr::mul(Expr::c(c.abs()), n),
                None => Expr::c(c.abs()),
            };
            if let Some(d) = den {
                term = Expr::div(term, d);
            }
            sum = Some(match sum {
                None if *c < 0.0 => Expr::neg(term),
                None => term,
                Some(s) if *c < 0.0 => Expr::sub(s, term),
                Some(s) => Expr::add(s, term),
            });
        }
        sum.unwrap_or(Expr::Const(0.0))
    }
}

fn normalize(e: &Expr) -> Poly {
    match e {
        Expr::Const(c) => Poly::constant(*c),
        Expr::Var(_) | Expr::Param(_) => Poly::atom(e.clone()),
        Expr::Unary(UnaryOp::Neg, a) => Poly::default().add(&normalize(a), -1.0),
        Expr::Unary(op, a) => {
            let inner = normalize(a);
            if let Some(c) = inner.as_constant() {
                if let Some(v) = op.apply(c).filter(|v| v.is_finite()) {
                    return Poly::constant(v);
                }
            }
            Poly::atom(Expr::unary(*op, inner.to_expr()))
        }
        Expr::Binary(op, a, b) => {
            let (pa, pb) = (normalize(a), normalize(b));
            match op {
                BinaryOp::Add => pa.add(&pb, 1.0),
                BinaryOp::Sub => pa.add(&pb, -1.0),
                BinaryOp::Mul => pa.mul(&pb),
                BinaryOp::Div => match pb.as_constant() {
                    Some(c) if c != 0.0 => pa.mul(&Poly::constant(1.0 / c)),
                    _ => {
                        let mut inv = Poly::atom(pb.to_expr());
                        let key = inv.atoms.keys().next().expect("one atom").clone();
                        inv.terms = BTreeMap::from([(vec![(key, -1)], 1.0)]);
                        pa.mul(&inv)
                    }
                },
                BinaryOp::Pow => {
                    let k = pb.as_constant().filter(|k| k.fract() == 0.0 && (0.0..=8.0).contains(k));
                    match k {
                        Some(k) => {
                            let mut out = Poly::constant(1.0);
                            for _ in 0..k as i32 {
                                out = out.mul(&pa);
                            }
                            out
                        }
                        None => Poly::atom(Expr::pow(pa.to_expr(), pb.to_expr())),
                    }
                }
            }
        }
    }
}

impl Expr {
    /// Expanded and collected form, used to recognise expressions that
    /// vanish identically. May reassociate floating-point operations.
    pub fn expand_collect(&self) -> Expr {
        normalize(self).to_expr()
    }

    /// Whether the expanded form is the constant zero.
    pub fn is_identically_zero(&self) -> bool {
        normalize(self).terms.is_empty()
    }
}
