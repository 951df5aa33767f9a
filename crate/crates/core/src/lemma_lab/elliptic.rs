//! Reconstruction of the nonlinearity `f` in `Δu + f(u) = 0`.
//!
//! Along the gradient orbit `Σ₀` through the origin, `g(t) = u(σ(t))` is
//! strictly increasing, so `f(s) = −Δu(σ(g⁻¹(s)))` is read off a table of
//! `(u, −Δu)` pairs. The table is interpolated by a monotone-limited cubic
//! and never extrapolated: values of `u` outside the traced range are
//! skipped and counted.
//!
//! ```
//! use flowlab::field::Builtin;
//! use flowlab::lemma_lab::elliptic::{reconstruct_f, ReconstructOptions};
//!
//! let cosh = Builtin::Cosh.build().unwrap();
//! let rf = reconstruct_f(&cosh, &ReconstructOptions::default()).unwrap();
//! assert!((rf.eval(1.5).unwrap() + 1.5).abs() < 1e-9);
//! assert!(rf.eval(1e3).is_none());
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::LemmaError;
use crate::field::VectorField;
use crate::geom::{Point, Rect};
use crate::tracer::{trace_gradient, IntegratorConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructOptions {
    /// Time span of the base orbit; the domain box usually stops it first.
    pub t_span: (f64, f64),
    /// Number of table nodes, uniform in `t`.
    pub table_size: usize,
    /// Start of the base orbit (the origin unless it lies outside the domain).
    pub start: Point,
    /// Grid used for the admissibility check on the domain.
    pub eta_grid: usize,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions { t_span: (-50.0, 50.0), table_size: 16001, start: [0.0, 0.0], eta_grid: 101 }
    }
}

/// `f` tabulated along the base orbit with its interpolant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructedF {
    /// Strictly increasing values of `u` along the orbit.
    pub s: Vec<f64>,
    /// `−Δu` at the same points.
    pub f: Vec<f64>,
    /// Limited node derivatives of the interpolant.
    pub slopes: Vec<f64>,
    pub s_range: (f64, f64),
    /// Set when the traced range of `u` is shorter than one unit.
    pub narrow_range: bool,
}

impl ReconstructedF {
    /// Builds the interpolant from a strictly increasing table.
    pub fn from_table(s: Vec<f64>, f: Vec<f64>) -> Result<Self, LemmaError> {
        if s.len() < 3 || s.len() != f.len() {
            return Err(LemmaError::Invalid("table needs at least three matching nodes".into()));
        }
        if let Some(i) = s.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(LemmaError::Invalid(format!("table not strictly increasing at node {i}")));
        }
        let slopes = limited_slopes(&s, &f);
        let s_range = (s[0], s[s.len() - 1]);
        Ok(ReconstructedF { narrow_range: s_range.1 - s_range.0 < 1.0, s, f, slopes, s_range })
    }

    fn locate(&self, x: f64) -> Option<(usize, f64, f64)> {
        if !(x >= self.s_range.0 && x <= self.s_range.1) {
            return None;
        }
        let i = self.s.partition_point(|&v| v <= x).clamp(1, self.s.len() - 1) - 1;
        let h = self.s[i + 1] - self.s[i];
        Some((i, h, (x - self.s[i]) / h))
    }

    /// `f(x)`, or `None` outside the tabulated range.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let (i, h, t) = self.locate(x)?;
        // Power form of the Hermite cubic; flat data evaluates exactly.
        let (a, b) = (h * self.slopes[i], h * self.slopes[i + 1]);
        let d = self.f[i + 1] - self.f[i];
        Some(self.f[i] + t * (a + t * ((3.0 * d - 2.0 * a - b) + t * (a + b - 2.0 * d))))
    }

    /// `f′(x)`, or `None` outside the tabulated range.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        let (i, h, t) = self.locate(x)?;
        let (d00, d10, d01, d11) =
            (6.0 * t * t - 6.0 * t, 3.0 * t * t - 4.0 * t + 1.0, 6.0 * t - 6.0 * t * t, 3.0 * t * t - 2.0 * t);
        Some((d00 * self.f[i] + d01 * self.f[i + 1]) / h + d10 * self.slopes[i] + d11 * self.slopes[i + 1])
    }

    /// Largest `|f_i - g(s_i)|` over the table nodes.
    pub fn max_deviation(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.s.iter().zip(&self.f).map(|(&s, &f)| (f - g(s)).abs()).fold(0.0, f64::max)
    }
}

/// Three-point derivatives, set to zero at local extrema of the data and
/// clamped to three times the smaller adjacent secant, so each cubic piece
/// stays within the range of its monotone data.
fn limited_slopes(s: &[f64], f: &[f64]) -> Vec<f64> {
    let n = s.len();
    let h: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (f[i + 1] - f[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (h[i] * delta[i - 1] + h[i - 1] * delta[i]) / (h[i - 1] + h[i]);
    }
    d[0] = ((2.0 * h[0] + h[1]) * delta[0] - h[0] * delta[1]) / (h[0] + h[1]);
    d[n - 1] = ((2.0 * h[n - 2] + h[n - 3]) * delta[n - 2] - h[n - 2] * delta[n - 3]) / (h[n - 2] + h[n - 3]);
    for i in 0..n {
        let left = if i > 0 { Some(delta[i - 1]) } else { None };
        let right = if i + 1 < n { Some(delta[i]) } else { None };
        let (lo, hi) = match (left, right) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, a),
            (None, Some(b)) => (b, b),
            (None, None) => unreachable!("at least three nodes"),
        };
        if lo * hi <= 0.0 || d[i] * lo <= 0.0 {
            d[i] = 0.0;
        } else {
            let cap = 3.0 * lo.abs().min(hi.abs());
            d[i] = d[i].signum() * d[i].abs().min(cap);
        }
    }
    d
}

/// Tabulates `f(s) = −Δu` along the gradient orbit through `opts.start`.
///
/// Refuses fields with a stagnation point on the domain box.
pub fn reconstruct_f(field: &VectorField, opts: &ReconstructOptions) -> Result<ReconstructedF, LemmaError> {
    if opts.table_size < 3 {
        return Err(LemmaError::Invalid("table_size must be at least 3".into()));
    }
    let bounds = field.estimate_eta(field.domain(), opts.eta_grid)?;
    if !bounds.admissible {
        return Err(LemmaError::Hypothesis(format!(
            "stagnation on the domain: |v| = {:e} at ({}, {})",
            bounds.eta_lo, bounds.argmin[0], bounds.argmin[1]
        )));
    }
    let cfg = IntegratorConfig::span(opts.t_span.0, opts.t_span.1);
    let traj = trace_gradient(field, opts.start, &cfg)?;
    let (t0, t1) = traj.t_range();
    let m = opts.table_size;
    let rows: Vec<Result<(f64, f64), LemmaError>> = (0..m)
        .into_par_iter()
        .map(|k| {
            let t = t0 + (t1 - t0) * k as f64 / (m - 1) as f64;
            let x = traj.state_at(t);
            Ok((field.stream(x)?, -field.vorticity_at(x)?))
        })
        .collect();
    let mut s = Vec::with_capacity(m);
    let mut f = Vec::with_capacity(m);
    for r in rows {
        let (a, b) = r?;
        s.push(a);
        f.push(b);
    }
    ReconstructedF::from_table(s, f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemilinearReport {
    /// `max |Δu(x) + f(u(x))|` over the checked points.
    pub max_residual: f64,
    pub worst_at: Option<Point>,
    pub checked: usize,
    /// Points whose `u` fell outside the tabulated range.
    pub skipped: usize,
}

fn fold_report(rows: Vec<Option<(f64, Point)>>) -> SemilinearReport {
    let mut out = SemilinearReport { max_residual: 0.0, worst_at: None, checked: 0, skipped: 0 };
    for r in rows {
        match r {
            Some((res, x)) => {
                out.checked += 1;
                if res > out.max_residual || out.worst_at.is_none() {
                    out.max_residual = out.max_residual.max(res);
                    out.worst_at = Some(x);
                }
            }
            None => out.skipped += 1,
        }
    }
    out
}

/// Checks `Δu + f(u) = 0` at the given points.
pub fn verify_semilinear(field: &VectorField, rf: &ReconstructedF, points: &[Point]) -> Result<SemilinearReport, LemmaError> {
    let rows: Result<Vec<Option<(f64, Point)>>, LemmaError> = points
        .par_iter()
        .map(|&x| {
            let u = field.stream(x)?;
            Ok(rf.eval(u).map(|fu| Ok::<_, LemmaError>(((field.vorticity_at(x)? + fu).abs(), x))).transpose()?)
        })
        .collect();
    Ok(fold_report(rows?))
}

/// Checks the differentiated identity `Δ(∂u/∂x1) + f′(u) ∂u/∂x1 = 0`.
pub fn verify_differentiated(field: &VectorField, rf: &ReconstructedF, points: &[Point]) -> Result<SemilinearReport, LemmaError> {
    let rows: Result<Vec<Option<(f64, Point)>>, LemmaError> = points
        .par_iter()
        .map(|&x| {
            let u = field.stream(x)?;
            let Some(fp) = rf.derivative(u) else { return Ok(None) };
            let lap = field.laplacian_grad_u(x)?[0];
            let du = field.grad_u(x)?[0];
            Ok(Some(((lap + fp * du).abs(), x)))
        })
        .collect();
    Ok(fold_report(rows?))
}

/// `n` points spread over `rect` from a fixed low-discrepancy sequence.
pub fn sample_points(rect: Rect, n: usize) -> Vec<Point> {
    // Additive recurrence with the plastic-number constants.
    let (a1, a2) = (0.754_877_666_246_692_7, 0.569_840_290_998_053_3);
    (0..n)
        .map(|k| {
            let k = k as f64 + 1.0;
            let (p, q) = ((0.5 + a1 * k).fract(), (0.5 + a2 * k).fract());
            [rect.min[0] + p * rect.width(), rect.min[1] + q * rect.height()]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Builtin;

    #[test]
    fn cosh_recovers_minus_identity() {
        let f = Builtin::Cosh.build().unwrap();
        let rf = reconstruct_f(&f, &ReconstructOptions::default()).unwrap();
        assert!(rf.max_deviation(|s| -s) <= 1e-8);
        assert!(rf.s_range.0 < -7.0 && rf.s_range.1 > 7.0);
        assert!(!rf.narrow_range);
        let pts = sample_points(Rect::square(1.5), 1000);
        let rep = verify_semilinear(&f, &rf, &pts).unwrap();
        assert_eq!((rep.checked, rep.skipped), (1000, 0));
        assert!(rep.max_residual <= 1e-6, "{}", rep.max_residual);
        let d = verify_differentiated(&f, &rf, &pts).unwrap();
        assert!(d.max_residual <= 1e-3, "{}", d.max_residual);
    }

    #[test]
    fn couette_is_constant_one() {
        let f = Builtin::Couette { a: 1.0, b: 2.0 }.build().unwrap();
        let rf = reconstruct_f(&f, &ReconstructOptions::default()).unwrap();
        assert!(rf.max_deviation(|_| 1.0) <= 1e-9);
        let pts = sample_points(f.domain(), 500);
        let rep = verify_semilinear(&f, &rf, &pts).unwrap();
        assert!(rep.checked > 0);
        assert!(rep.max_residual <= 1e-9);
    }

    #[test]
    fn wavy_shear_residual() {
        let f = Builtin::Shear { profile: "2+sin(x2)".into(), angle: 0.0 }.build().unwrap();
        let rf = reconstruct_f(&f, &ReconstructOptions::default()).unwrap();
        let pts = sample_points(Rect::square(3.0), 1000);
        let rep = verify_semilinear(&f, &rf, &pts).unwrap();
        assert_eq!(rep.skipped, 0);
        assert!(rep.max_residual <= 1e-5, "{}", rep.max_residual);
    }

    #[test]
    fn cellular_is_refused() {
        let f = Builtin::Cellular { alpha: 1.0, beta: 1.0 }.build().unwrap();
        let err = reconstruct_f(&f, &ReconstructOptions::default()).unwrap_err();
        assert!(matches!(err, LemmaError::Hypothesis(_)));
    }

    #[test]
    fn no_extrapolation_and_no_overshoot() {
        let s: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let f: Vec<f64> = s.iter().map(|&x| if x < 2.0 { 0.0 } else { 1.0 }).collect();
        let rf = ReconstructedF::from_table(s, f).unwrap();
        assert!(rf.narrow_range == false);
        assert!(rf.eval(-0.01).is_none() && rf.eval(4.91).is_none());
        for k in 0..=4900 {
            let v = rf.eval(k as f64 * 0.001).unwrap();
            assert!((0.0..=1.0).contains(&v), "overshoot {v}");
        }
        assert!(ReconstructedF::from_table(vec![0.0, 1.0, 1.0], vec![0.0; 3]).is_err());
        let narrow = ReconstructedF::from_table(vec![0.0, 0.1, 0.2], vec![0.0; 3]).unwrap();
        assert!(narrow.narrow_range);
    }

    #[test]
    fn interpolant_reproduces_smooth_data() {
        let s: Vec<f64> = (0..2001).map(|i| -10.0 + i as f64 * 0.01).collect();
        let f: Vec<f64> = s.iter().map(|x| x.cos()).collect();
        let rf = ReconstructedF::from_table(s, f).unwrap();
        for k in 0..997 {
            let x = -9.9 + k as f64 * 0.0199;
            assert!((rf.eval(x).unwrap() - x.cos()).abs() < 2e-5);
        }
    }
}
