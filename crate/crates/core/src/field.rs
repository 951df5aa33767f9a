//! Planar velocity fields, their stream functions, and exact diagnostics.
//!
//! A [`VectorField`] carries the symbolic components `v = (v1, v2)`, an
//! optional pressure, a declared domain box and a stream function `u` with
//! `u(0) = 0`, `∂u/∂x1 = v2`, `∂u/∂x2 = -v1`. All derivatives used by the
//! diagnostics are symbolic.
//!
//! ```
//! use flowlab::field::Builtin;
//!
//! let cosh = Builtin::Cosh.build().unwrap();
//! assert_eq!(cosh.stream([0.0, 1.0]).unwrap(), 1.0);
//! assert!(cosh.divergence().is_identically_zero());
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse, Expr, ExprError, ParamEnv, Var};
use crate::geom::{self, Point, Rect};
use crate::quad::{self, QuadError};

/// Below this speed a point counts as a stagnation point.
pub const STAGNATION_TOL: f64 = 1e-8;

/// Absolute accuracy target for stream-function quadrature.
pub const QUADRATURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("field `{0}` has no pressure")]
    MissingPressure(String),
    #[error("unknown built-in field `{0}`")]
    UnknownBuiltin(String),
    #[error("built-in `{builtin}` needs parameter `{param}`")]
    MissingParameter { builtin: String, param: String },
    #[error("invalid domain box {0:?}")]
    InvalidDomain(Rect),
    #[error("expression for `{what}` uses parameter `{param}` that is not declared")]
    UndeclaredParameter { what: String, param: String },
    #[error("rescale factor must be finite and non-zero, got {0}")]
    BadFactor(f64),
}

/// How the stream function is represented.
#[derive(Debug, Clone, PartialEq)]
pub enum StreamFunction {
    /// Closed form `u(x1, x2)`.
    Symbolic(Expr),
    /// Shear flow `v = V(x·e⊥) e` with `e = (cos angle, sin angle)`:
    /// `u(x) = -∫₀^{x·e⊥} V(r) dr`, where the profile is written in `x2`.
    Shear { angle: f64, profile: Expr },
    /// Line integral of `∇u = (v2, -v1)` along the segment from the origin.
    Quadrature,
}

#[derive(Debug, Clone)]
enum CompiledStream {
    Symbolic { u: Expr, grad: [Expr; 2] },
    Shear { angle: f64, profile: Expr },
    Quadrature,
}

#[derive(Debug, Clone)]
struct Compiled {
    v: [Expr; 2],
    jac: [[Expr; 2]; 2],
    vorticity: Expr,
    divergence: Expr,
    pressure_grad: Option<[Expr; 2]>,
    lap_grad_u: [Expr; 2],
    stream: CompiledStream,
}

/// A planar velocity field with its pressure and stream function.
#[derive(Debug, Clone)]
pub struct VectorField {
    name: String,
    v: [Expr; 2],
    env: ParamEnv,
    domain: Rect,
    pressure: Option<Expr>,
    stream: StreamFunction,
    compiled: Compiled,
}

/// Bounds of `|v|` sampled on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldBounds {
    /// Minimum of `|v|` (grid plus local refinement).
    pub eta_lo: f64,
    /// Maximum of `|v|` (grid plus local refinement).
    pub eta_hi: f64,
    /// `min(eta_lo, 1/eta_hi, 1)`, the admissibility constant on the box.
    pub eta: f64,
    pub grid_spacing: f64,
    pub argmin: Point,
    pub argmax: Point,
    /// `eta_lo > STAGNATION_TOL`.
    pub admissible: bool,
}

impl VectorField {
    /// Field from explicit components. Without a stream function the
    /// quadrature representation is used.
    pub fn from_components(
        name: impl Into<String>,
        v1: Expr,
        v2: Expr,
        env: ParamEnv,
        domain: Rect,
        stream: Option<Expr>,
        pressure: Option<Expr>,
    ) -> Result<Self, FieldError> {
        let stream = match stream {
            Some(u) => StreamFunction::Symbolic(u),
            None => StreamFunction::Quadrature,
        };
        Self::assemble(name.into(), [v1, v2], env, domain, pressure, stream)
    }

    /// Field `v = ∇⊥u = (-∂u/∂x2, ∂u/∂x1)` from a stream function.
    pub fn from_stream(
        name: impl Into<String>,
        u: Expr,
        env: ParamEnv,
        domain: Rect,
        pressure: Option<Expr>,
    ) -> Result<Self, FieldError> {
        let v1 = Expr::neg(u.differentiate(Var::X2)).simplify();
        let v2 = u.differentiate(Var::X1);
        Self::assemble(name.into(), [v1, v2], env, domain, pressure, StreamFunction::Symbolic(u))
    }

    /// Parses the component strings and builds the field.
    pub fn parse_components(
        name: impl Into<String>,
        v1: &str,
        v2: &str,
        env: ParamEnv,
        domain: Rect,
    ) -> Result<Self, FieldError> {
        Self::from_components(name, parse(v1)?, parse(v2)?, env, domain, None, None)
    }

    fn assemble(
        name: String,
        v: [Expr; 2],
        env: ParamEnv,
        domain: Rect,
        pressure: Option<Expr>,
        stream: StreamFunction,
    ) -> Result<Self, FieldError> {
        if !domain.is_valid() {
            return Err(FieldError::InvalidDomain(domain));
        }
        let check = |what: &str, e: &Expr| -> Result<(), FieldError> {
            match e.params().into_iter().find(|p| !env.contains(p)) {
                Some(param) => Err(FieldError::UndeclaredParameter { what: what.into(), param }),
                None => Ok(()),
            }
        };
        check("v1", &v[0])?;
        check("v2", &v[1])?;
        if let Some(p) = &pressure {
            check("pressure", p)?;
        }
        match &stream {
            StreamFunction::Symbolic(u) => check("stream", u)?,
            StreamFunction::Shear { profile, .. } => check("profile", profile)?,
            StreamFunction::Quadrature => {}
        }
        let compiled = compile(&v, &env, pressure.as_ref(), &stream)?;
        Ok(VectorField { name, v, env, domain, pressure, stream, compiled })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn env(&self) -> &ParamEnv {
        &self.env
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    /// A copy of this field with a different domain box.
    pub fn with_domain(&self, domain: Rect) -> Result<Self, FieldError> {
        if !domain.is_valid() {
            return Err(FieldError::InvalidDomain(domain));
        }
        let mut out = self.clone();
        out.domain = domain;
        Ok(out)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn components(&self) -> &[Expr; 2] {
        &self.v
    }

    pub fn pressure(&self) -> Option<&Expr> {
        self.pressure.as_ref()
    }

    pub fn stream_function(&self) -> &StreamFunction {
        &self.stream
    }

    /// `v(x)`.
    pub fn velocity(&self, x: Point) -> Result<Point, FieldError> {
        let [a, b] = &self.compiled.v;
        Ok([a.eval_bound(x)?, b.eval_bound(x)?])
    }

    pub fn speed(&self, x: Point) -> Result<f64, FieldError> {
        Ok(geom::norm(self.velocity(x)?))
    }

    /// `∇u(x) = (v2, -v1)`.
    pub fn grad_u(&self, x: Point) -> Result<Point, FieldError> {
        let v = self.velocity(x)?;
        Ok([v[1], -v[0]])
    }

    /// `[[∂v1/∂x1, ∂v1/∂x2], [∂v2/∂x1, ∂v2/∂x2]]`.
    pub fn jacobian(&self, x: Point) -> Result<[[f64; 2]; 2], FieldError> {
        let j = &self.compiled.jac;
        Ok([
            [j[0][0].eval_bound(x)?, j[0][1].eval_bound(x)?],
            [j[1][0].eval_bound(x)?, j[1][1].eval_bound(x)?],
        ])
    }

    /// Symbolic divergence `∂v1/∂x1 + ∂v2/∂x2`; the constant zero when the
    /// expanded form cancels.
    pub fn divergence(&self) -> Expr {
        let d = Expr::add(self.v[0].differentiate(Var::X1), self.v[1].differentiate(Var::X2))
            .simplify();
        if d.is_identically_zero() {
            Expr::Const(0.0)
        } else {
            d
        }
    }

    pub fn divergence_at(&self, x: Point) -> Result<f64, FieldError> {
        Ok(self.compiled.divergence.eval_bound(x)?)
    }

    /// Symbolic vorticity `∂v2/∂x1 - ∂v1/∂x2`, which equals `Δu`.
    pub fn vorticity(&self) -> Expr {
        Expr::sub(self.v[1].differentiate(Var::X1), self.v[0].differentiate(Var::X2)).simplify()
    }

    pub fn vorticity_at(&self, x: Point) -> Result<f64, FieldError> {
        Ok(self.compiled.vorticity.eval_bound(x)?)
    }

    /// `Δ(∂u/∂x1), Δ(∂u/∂x2)` at `x`, i.e. `(Δv2, -Δv1)`.
    pub fn laplacian_grad_u(&self, x: Point) -> Result<Point, FieldError> {
        let [a, b] = &self.compiled.lap_grad_u;
        Ok([a.eval_bound(x)?, b.eval_bound(x)?])
    }

    /// `u(x)` with `u(0) = 0`.
    pub fn stream(&self, x: Point) -> Result<f64, FieldError> {
        match &self.compiled.stream {
            CompiledStream::Symbolic { u, .. } => Ok(u.eval_bound(x)?),
            CompiledStream::Shear { angle, profile } => {
                let s = shear_coordinate(*angle, x);
                let tol = 1e-13 * (1.0 + s.abs());
                let w = quad::integrate(|r| profile.eval_bound([0.0, r]), 0.0, s, tol)
                    .or_else(|_| quad::integrate(|r| profile.eval_bound([0.0, r]), 0.0, s, 1e3 * tol))?;
                Ok(-w.value)
            }
            CompiledStream::Quadrature => self.stream_by_quadrature(x),
        }
    }

    /// Gradient of `u` computed from the stream function's own
    /// representation (symbolic derivatives of `u`, the shear profile, or
    /// the field itself in quadrature mode).
    pub fn stream_gradient(&self, x: Point) -> Result<Point, FieldError> {
        match &self.compiled.stream {
            CompiledStream::Symbolic { grad, .. } => {
                Ok([grad[0].eval_bound(x)?, grad[1].eval_bound(x)?])
            }
            CompiledStream::Shear { angle, profile } => {
                let s = shear_coordinate(*angle, x);
                let vs = profile.eval_bound([0.0, s])?;
                let (sn, cs) = angle.sin_cos();
                // ∇(x·e⊥) = e⊥ = (-sin, cos)
                Ok([vs * sn, -vs * cs])
            }
            CompiledStream::Quadrature => self.grad_u(x),
        }
    }

    /// `u(x) = ∫₀¹ ∇u(sx)·x ds`, adaptive quadrature regardless of the
    /// stored representation.
    pub fn stream_by_quadrature(&self, x: Point) -> Result<f64, FieldError> {
        let q = quad::integrate(
            |s| {
                self.velocity([s * x[0], s * x[1]])
                    .map(|v| v[1] * x[0] - v[0] * x[1])
            },
            0.0,
            1.0,
            QUADRATURE_TOL,
        )?;
        Ok(q.value)
    }

    /// `u(x)` by quadrature along the path `0 → (x1, 0) → (x1, x2)`.
    pub fn stream_by_l_path(&self, x: Point) -> Result<f64, FieldError> {
        let a = quad::integrate(|r| self.velocity([r, 0.0]).map(|v| v[1]), 0.0, x[0], QUADRATURE_TOL)?;
        let b = quad::integrate(|r| self.velocity([x[0], r]).map(|v| -v[0]), 0.0, x[1], QUADRATURE_TOL)?;
        Ok(a.value + b.value)
    }

    /// Max over an `n × n` grid of `|v·∇v + ∇p| + |div v|`.
    pub fn euler_residual(&self, rect: Rect, n: usize) -> Result<f64, FieldError> {
        let pg = self
            .compiled
            .pressure_grad
            .as_ref()
            .ok_or_else(|| FieldError::MissingPressure(self.name.clone()))?;
        let rows: Vec<Result<f64, FieldError>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut worst = 0.0f64;
                for i in 0..n {
                    let x = rect.grid_point(n, i, j);
                    let v = self.velocity(x)?;
                    let jac = self.jacobian(x)?;
                    let adv = [
                        v[0] * jac[0][0] + v[1] * jac[0][1],
                        v[0] * jac[1][0] + v[1] * jac[1][1],
                    ];
                    let r = [adv[0] + pg[0].eval_bound(x)?, adv[1] + pg[1].eval_bound(x)?];
                    let div = jac[0][0] + jac[1][1];
                    worst = worst.max(geom::norm(r) + div.abs());
                }
                Ok(worst)
            })
            .collect();
        rows.into_iter().try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
    }

    /// Samples `|v|` on an `n × n` grid over `rect`, then refines the
    /// extreme points by a shrinking pattern search.
    pub fn estimate_eta(&self, rect: Rect, n: usize) -> Result<FieldBounds, FieldError> {
        let n = n.max(2);
        type RowExt = (f64, Point, f64, Point);
        let rows: Vec<Result<RowExt, FieldError>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut ext = (f64::INFINITY, [0.0; 2], f64::NEG_INFINITY, [0.0; 2]);
                for i in 0..n {
                    let x = rect.grid_point(n, i, j);
                    let s = self.speed(x)?;
                    if s < ext.0 {
                        ext.0 = s;
                        ext.1 = x;
                    }
                    if s > ext.2 {
                        ext.2 = s;
                        ext.3 = x;
                    }
                }
                Ok(ext)
            })
            .collect();
        let mut lo = (f64::INFINITY, [0.0; 2]);
        let mut hi = (f64::NEG_INFINITY, [0.0; 2]);
        for r in rows {
            let (a, pa, b, pb) = r?;
            if a < lo.0 {
                lo = (a, pa);
            }
            if b > hi.0 {
                hi = (b, pb);
            }
        }
        let spacing = rect.width().max(rect.height()) / (n - 1) as f64;
        let lo = self.pattern_search(rect, lo, spacing, -1.0)?;
        let hi = self.pattern_search(rect, hi, spacing, 1.0)?;
        let eta = lo.0.min(1.0 / hi.0).min(1.0);
        Ok(FieldBounds {
            eta_lo: lo.0,
            eta_hi: hi.0,
            eta,
            grid_spacing: spacing,
            argmin: lo.1,
            argmax: hi.1,
            admissible: lo.0 > STAGNATION_TOL,
        })
    }

    /// Local search improving `sign * |v|` from `start`.
    fn pattern_search(
        &self,
        rect: Rect,
        start: (f64, Point),
        spacing: f64,
        sign: f64,
    ) -> Result<(f64, Point), FieldError> {
        let (mut best, mut at) = start;
        let mut step = spacing;
        for _ in 0..60 {
            let mut moved = false;
            for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
                let p = [
                    (at[0] + dx * step).clamp(rect.min[0], rect.max[0]),
                    (at[1] + dy * step).clamp(rect.min[1], rect.max[1]),
                ];
                let s = self.speed(p)?;
                if sign * s > sign * best {
                    best = s;
                    at = p;
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
                if step < 1e-12 * (1.0 + spacing) {
                    break;
                }
            }
        }
        Ok((best, at))
    }

    /// `w(x) = v(c·x)`, with `ũ(x) = u(c·x)/c`.
    pub fn rescale(&self, c: f64) -> Result<VectorField, FieldError> {
        if !c.is_finite() || c == 0.0 {
            return Err(FieldError::BadFactor(c));
        }
        let sx = Expr::mul(Expr::c(c), Expr::x1());
        let sy = Expr::mul(Expr::c(c), Expr::x2());
        let sub = |e: &Expr| e.substitute(&sx, &sy).simplify();
        let stream = match &self.stream {
            StreamFunction::Symbolic(u) => {
                StreamFunction::Symbolic(Expr::div(sub(u), Expr::c(c)).simplify())
            }
            StreamFunction::Shear { angle, profile } => StreamFunction::Shear {
                angle: *angle,
                profile: profile.substitute(&Expr::x1(), &sy).simplify(),
            },
            StreamFunction::Quadrature => StreamFunction::Quadrature,
        };
        let (a, b) = (scale_point(self.domain.min, 1.0 / c), scale_point(self.domain.max, 1.0 / c));
        let domain = Rect::new([a[0].min(b[0]), a[1].min(b[1])], [a[0].max(b[0]), a[1].max(b[1])]);
        Self::assemble(
            format!("{}∘{}x", self.name, c),
            [sub(&self.v[0]), sub(&self.v[1])],
            self.env.clone(),
            domain,
            self.pressure.as_ref().map(sub),
            stream,
        )
    }

    /// `w(x) = v(y + x)`, with `ũ(x) = u(y + x) - u(y)`.
    pub fn shift(&self, y: Point) -> Result<VectorField, FieldError> {
        let sx = Expr::add(Expr::c(y[0]), Expr::x1());
        let sy = Expr::add(Expr::c(y[1]), Expr::x2());
        let sub = |e: &Expr| e.substitute(&sx, &sy).simplify();
        let stream = match &self.stream {
            StreamFunction::Symbolic(u) => {
                let uy = self.stream(y)?;
                StreamFunction::Symbolic(Expr::sub(sub(u), Expr::c(uy)).simplify())
            }
            StreamFunction::Shear { angle, profile } => {
                let sy0 = shear_coordinate(*angle, y);
                let shifted = Expr::add(Expr::c(sy0), Expr::x2());
                StreamFunction::Shear {
                    angle: *angle,
                    profile: profile.substitute(&Expr::x1(), &shifted).simplify(),
                }
            }
            StreamFunction::Quadrature => StreamFunction::Quadrature,
        };
        let domain = Rect::new(geom::sub(self.domain.min, y), geom::sub(self.domain.max, y));
        Self::assemble(
            format!("{}∘(x+{:?})", self.name, y),
            [sub(&self.v[0]), sub(&self.v[1])],
            self.env.clone(),
            domain,
            self.pressure.as_ref().map(sub),
            stream,
        )
    }

    /// `w(x) = R v(R⁻¹x)` for the rotation `R` by `psi`, with `ũ(x) = u(R⁻¹x)`.
    pub fn rotate(&self, psi: f64) -> Result<VectorField, FieldError> {
        let (s, c) = psi.sin_cos();
        // R⁻¹x = (c x1 + s x2, -s x1 + c x2)
        let rx = Expr::add(Expr::mul(Expr::c(c), Expr::x1()), Expr::mul(Expr::c(s), Expr::x2()));
        let ry = Expr::add(Expr::mul(Expr::c(-s), Expr::x1()), Expr::mul(Expr::c(c), Expr::x2()));
        let sub = |e: &Expr| e.substitute(&rx, &ry).simplify();
        let (a, b) = (sub(&self.v[0]), sub(&self.v[1]));
        let w1 = Expr::sub(Expr::mul(Expr::c(c), a.clone()), Expr::mul(Expr::c(s), b.clone())).simplify();
        let w2 = Expr::add(Expr::mul(Expr::c(s), a), Expr::mul(Expr::c(c), b)).simplify();
        let stream = match &self.stream {
            StreamFunction::Symbolic(u) => StreamFunction::Symbolic(sub(u)),
            StreamFunction::Shear { angle, profile } => {
                StreamFunction::Shear { angle: angle + psi, profile: profile.clone() }
            }
            StreamFunction::Quadrature => StreamFunction::Quadrature,
        };
        let hx = self.domain.width() / 2.0;
        let hy = self.domain.height() / 2.0;
        let half = hx.min(hy) / (c.abs() + s.abs());
        let domain = Rect::centered(geom::rotate(self.domain.center(), psi), half);
        Self::assemble(
            format!("R({psi})∘{}", self.name),
            [w1, w2],
            self.env.clone(),
            domain,
            self.pressure.as_ref().map(sub),
            stream,
        )
    }
}

fn scale_point(p: Point, s: f64) -> Point {
    [p[0] * s, p[1] * s]
}

/// `x·e⊥` for `e = (cos angle, sin angle)`.
pub fn shear_coordinate(angle: f64, x: Point) -> f64 {
    let (s, c) = angle.sin_cos();
    -s * x[0] + c * x[1]
}

fn compile(
    v: &[Expr; 2],
    env: &ParamEnv,
    pressure: Option<&Expr>,
    stream: &StreamFunction,
) -> Result<Compiled, FieldError> {
    let b = [v[0].bind(env)?, v[1].bind(env)?];
    let d = |e: &Expr, var| e.differentiate(var);
    let jac = [
        [d(&b[0], Var::X1), d(&b[0], Var::X2)],
        [d(&b[1], Var::X1), d(&b[1], Var::X2)],
    ];
    let vorticity = Expr::sub(jac[1][0].clone(), jac[0][1].clone()).simplify();
    let divergence = Expr::add(jac[0][0].clone(), jac[1][1].clone()).simplify();
    let pressure_grad = match pressure {
        Some(p) => {
            let p = p.bind(env)?;
            Some([d(&p, Var::X1), d(&p, Var::X2)])
        }
        None => None,
    };
    let lap_grad_u = [b[1].laplacian(), Expr::neg(b[0].laplacian()).simplify()];
    let stream = match stream {
        StreamFunction::Symbolic(u) => {
            let u = u.bind(env)?;
            let grad = [d(&u, Var::X1), d(&u, Var::X2)];
            CompiledStream::Symbolic { u, grad }
        }
        StreamFunction::Shear { angle, profile } => {
            CompiledStream::Shear { angle: *angle, profile: profile.bind(env)? }
        }
        StreamFunction::Quadrature => CompiledStream::Quadrature,
    };
    Ok(Compiled { v: b, jac, vorticity, divergence, pressure_grad, lap_grad_u, stream })
}

/// The fields used throughout the examples and tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "snake_case")]
pub enum Builtin {
    /// `u = sin(αx1)sin(βx2)`: an Euler solution with stagnation points.
    Cellular { alpha: f64, beta: f64 },
    /// `u = x2 cosh(x1)`: an unbounded Euler solution without stagnation.
    Cosh,
    /// `v = V(x·e⊥) e`, `e = (cos angle, sin angle)`; `V` is written in `x2`.
    Shear { profile: String, angle: f64 },
    /// `v = (a x2 + b, 0)`.
    Couette { a: f64, b: f64 },
}

impl Builtin {
    /// Looks a built-in up by name, taking numeric parameters from `env`
    /// and the shear profile from `profile`.
    pub fn from_name(name: &str, env: &ParamEnv, profile: Option<&str>) -> Result<Self, FieldError> {
        let need = |p: &str| {
            env.get(p).ok_or_else(|| FieldError::MissingParameter {
                builtin: name.to_string(),
                param: p.to_string(),
            })
        };
        Ok(match name {
            "cellular" => Builtin::Cellular { alpha: need("alpha")?, beta: need("beta")? },
            "cosh" => Builtin::Cosh,
            "shear" => Builtin::Shear {
                profile: profile
                    .ok_or_else(|| FieldError::MissingParameter {
                        builtin: name.into(),
                        param: "profile".into(),
                    })?
                    .to_string(),
                angle: env.get("angle").unwrap_or(0.0),
            },
            "couette" => Builtin::Couette { a: need("a")?, b: need("b")? },
            other => return Err(FieldError::UnknownBuiltin(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Cellular { .. } => "cellular",
            Builtin::Cosh => "cosh",
            Builtin::Shear { .. } => "shear",
            Builtin::Couette { .. } => "couette",
        }
    }

    /// Default domain box.
    pub fn default_domain(&self) -> Rect {
        match self {
            Builtin::Couette { a, b } if *a != 0.0 => {
                let zero = -b / a;
                if *a > 0.0 {
                    Rect::new([-10.0, zero + 0.5], [10.0, zero + 12.0])
                } else {
                    Rect::new([-10.0, zero - 12.0], [10.0, zero - 0.5])
                }
            }
            Builtin::Cosh => Rect::square(8.0),
            Builtin::Shear { .. } => Rect::square(20.0),
            _ => Rect::square(10.0),
        }
    }

    pub fn build(&self) -> Result<VectorField, FieldError> {
        self.build_on(self.default_domain())
    }

    pub fn build_on(&self, domain: Rect) -> Result<VectorField, FieldError> {
        match self {
            Builtin::Cellular { alpha, beta } => {
                let env = ParamEnv::from_pairs([("alpha", *alpha), ("beta", *beta)])?;
                let u = parse("sin(alpha*x1)*sin(beta*x2)")?;
                let p = parse("beta^2/4*cos(2*alpha*x1)+alpha^2/4*cos(2*beta*x2)")?;
                let f = VectorField::from_stream("cellular", u, env, domain, Some(p))?;
                Ok(f)
            }
            Builtin::Cosh => VectorField::from_components(
                "cosh",
                parse("-cosh(x1)")?,
                parse("x2*sinh(x1)")?,
                ParamEnv::new(),
                domain,
                Some(parse("x2*cosh(x1)")?),
                Some(parse("-cosh(2*x1)/4+x2^2/2")?),
            ),
            Builtin::Shear { profile, angle } => {
                let profile = parse(profile)?;
                let (s, c) = angle.sin_cos();
                let coord =
                    Expr::add(Expr::mul(Expr::c(-s), Expr::x1()), Expr::mul(Expr::c(c), Expr::x2()))
                        .simplify();
                let vs = profile.substitute(&Expr::x1(), &coord);
                let v1 = Expr::mul(vs.clone(), Expr::c(c)).simplify();
                let v2 = Expr::mul(vs, Expr::c(s)).simplify();
                let env = ParamEnv::new();
                VectorField::assemble(
                    "shear".into(),
                    [v1, v2],
                    env,
                    domain,
                    Some(Expr::Const(0.0)),
                    StreamFunction::Shear { angle: *angle, profile },
                )
            }
            Builtin::Couette { a, b } => {
                let env = ParamEnv::from_pairs([("a", *a), ("b", *b)])?;
                VectorField::from_components(
                    "couette",
                    parse("a*x2+b")?,
                    Expr::Const(0.0),
                    env,
                    domain,
                    Some(parse("-(a*x2^2/2+b*x2)")?),
                    Some(Expr::Const(0.0)),
                )
            }
        }
    }
}
