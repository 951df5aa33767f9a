//! Scans for the forbidden local pattern of gradient orbits and streamlines.
//!
//! A pattern is four parameters `τ1 < τ2 < τ3 ≤ τ4` (or the mirrored
//! order) such that `σ(τ1)` lies strictly inside the segment
//! `(σ(τ2), σ(τ3))` while `σ(τ4)` is closer than a threshold to `σ(τ1)`:
//! the orbit leaves `σ(τ1)`, comes back across it and ends up nearby. Where
//! the argument of the flow oscillates by less than a limit on the unit
//! ball around `σ(τ1)` no such quadruple can exist, so every hit with that
//! hypothesis satisfied is a violation.
//!
//! The scan is exhaustive over sampled triples `(τ1, τ2, τ3)` that admit a
//! close `τ4` on the right side of `τ3`; the hypothesis is evaluated lazily
//! and cached per `τ1`.
//!
//! ```
//! use flowlab::field::Builtin;
//! use flowlab::lemma_lab::patterns::{scan_curve, PatternKind};
//!
//! let shear = Builtin::Shear { profile: "1".into(), angle: 0.0 }.build().unwrap();
//! let pts = vec![[0.0, 0.0], [-1.0, 0.0], [1.0, 0.0], [0.0, 1e-4]];
//! let ts = vec![0.0, 1.0, 2.0, 3.0];
//! let rep = scan_curve(&shear, &ts, &pts, 1.0, PatternKind::Gradient).unwrap();
//! assert_eq!(rep.violations.len(), 1);
//! ```

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{unit_ball_osc, LemmaError};
use crate::field::VectorField;
use crate::geom::{self, Point};
use crate::tracer::Trajectory;

/// Largest number of samples scanned per trajectory.
pub const MAX_SCAN_SAMPLES: usize = 400;

/// Relative collinearity tolerance for the betweenness test.
pub const COLLINEAR_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    /// Gradient orbits: closeness `η⁴`, oscillation limit `π/2`.
    Gradient,
    /// Streamlines: closeness `η²/4`, oscillation limit `π/4`.
    Streamline,
}

impl PatternKind {
    pub fn threshold(self, eta: f64) -> f64 {
        match self {
            PatternKind::Gradient => eta.powi(4),
            PatternKind::Streamline => eta * eta / 4.0,
        }
    }

    pub fn osc_limit(self) -> f64 {
        match self {
            PatternKind::Gradient => PI / 2.0,
            PatternKind::Streamline => PI / 4.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PatternKind::Gradient => "gradient",
            PatternKind::Streamline => "streamline",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternHit {
    pub tau: [f64; 4],
    pub points: [Point; 4],
    /// Oscillation over the unit ball around the first point.
    pub osc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternScanReport {
    pub kind: PatternKind,
    pub trajectory: String,
    pub eta: f64,
    pub threshold: f64,
    pub osc_limit: f64,
    pub samples: usize,
    /// Triples `(τ1, τ2, τ3)` tested for betweenness.
    pub tested: u64,
    /// Geometric matches, before the hypothesis check.
    pub candidates: usize,
    /// Matches discarded because the oscillation hypothesis failed.
    pub hypothesis_skipped: usize,
    pub violations: Vec<PatternHit>,
}

/// `p` strictly inside the open segment `(a, b)` up to the collinearity
/// tolerance.
fn strictly_between(p: Point, a: Point, b: Point) -> bool {
    let ab = geom::sub(b, a);
    let len2 = geom::dot(ab, ab);
    if len2 == 0.0 || p == a || p == b {
        return false;
    }
    let s = geom::dot(geom::sub(p, a), ab) / len2;
    if !(s > 0.0 && s < 1.0) {
        return false;
    }
    let off = geom::cross(ab, geom::sub(p, a)).abs() / len2.sqrt();
    off <= COLLINEAR_TOL * len2.sqrt()
}

/// Scans a sampled curve; `ts` must be strictly increasing.
pub fn scan_curve(
    field: &VectorField,
    ts: &[f64],
    pts: &[Point],
    eta: f64,
    kind: PatternKind,
) -> Result<PatternScanReport, LemmaError> {
    if ts.len() != pts.len() {
        return Err(LemmaError::Invalid("parameter and point lists differ in length".into()));
    }
    if ts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(LemmaError::Invalid("parameters must be strictly increasing".into()));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(LemmaError::Invalid(format!("eta must lie in (0, 1], got {eta}")));
    }
    let threshold = kind.threshold(eta);
    let n = pts.len();
    let mut report = PatternScanReport {
        kind,
        trajectory: String::new(),
        eta,
        threshold,
        osc_limit: kind.osc_limit(),
        samples: n,
        tested: 0,
        candidates: 0,
        hypothesis_skipped: 0,
        violations: Vec::new(),
    };
    let mut osc_cache: HashMap<usize, f64> = HashMap::new();
    for i1 in 0..n {
        let close: Vec<usize> = (0..n).filter(|&j| j != i1 && geom::dist(pts[i1], pts[j]) < threshold).collect();
        // Forward order τ1 < τ2 < τ3 ≤ τ4, then the mirrored order.
        let last_fwd = close.iter().copied().filter(|&j| j > i1).max();
        let first_bwd = close.iter().copied().filter(|&j| j < i1).min();
        let mut triples: Vec<(usize, usize, usize)> = Vec::new();
        if let Some(m) = last_fwd {
            for i2 in i1 + 1..=m {
                for i3 in i2 + 1..=m {
                    triples.push((i2, i3, m));
                }
            }
        }
        if let Some(m) = first_bwd {
            for i2 in (m..i1).rev() {
                for i3 in (m..i2).rev() {
                    triples.push((i2, i3, m));
                }
            }
        }
        for (i2, i3, i4) in triples {
            report.tested += 1;
            if !strictly_between(pts[i1], pts[i2], pts[i3]) {
                continue;
            }
            report.candidates += 1;
            let osc = match osc_cache.get(&i1) {
                Some(&o) => o,
                None => {
                    let o = unit_ball_osc(field, pts[i1])?;
                    osc_cache.insert(i1, o);
                    o
                }
            };
            if osc >= kind.osc_limit() {
                report.hypothesis_skipped += 1;
                continue;
            }
            report.violations.push(PatternHit {
                tau: [ts[i1], ts[i2], ts[i3], ts[i4]],
                points: [pts[i1], pts[i2], pts[i3], pts[i4]],
                osc,
            });
        }
    }
    Ok(report)
}

/// Samples a trajectory uniformly in `t`, at most [`MAX_SCAN_SAMPLES`] points.
pub fn subsample(traj: &Trajectory) -> (Vec<f64>, Vec<Point>) {
    let s = traj.samples();
    if s.len() <= MAX_SCAN_SAMPLES {
        return (s.iter().map(|x| x.t).collect(), s.iter().map(|x| x.x).collect());
    }
    let (t0, t1) = traj.t_range();
    let m = MAX_SCAN_SAMPLES;
    let ts: Vec<f64> = (0..m).map(|k| t0 + (t1 - t0) * k as f64 / (m - 1) as f64).collect();
    let pts = ts.iter().map(|&t| traj.state_at(t)).collect();
    (ts, pts)
}

fn scan_trajectory(field: &VectorField, traj: &Trajectory, eta: f64, kind: PatternKind) -> Result<PatternScanReport, LemmaError> {
    let (ts, pts) = subsample(traj);
    let mut rep = scan_curve(field, &ts, &pts, eta, kind)?;
    let x0 = traj.state_at(0.0);
    rep.trajectory = format!("{}:{}@({}, {})", traj.field, kind_label(traj), x0[0], x0[1]);
    Ok(rep)
}

fn kind_label(traj: &Trajectory) -> &'static str {
    if traj.kind.is_gradient() {
        "gradient"
    } else {
        "streamline"
    }
}

/// Scans a gradient orbit with closeness `η⁴`.
pub fn scan_oneleft(field: &VectorField, traj: &Trajectory, eta: f64) -> Result<PatternScanReport, LemmaError> {
    scan_trajectory(field, traj, eta, PatternKind::Gradient)
}

/// Scans a streamline with closeness `η²/4`.
pub fn scan_oneleftbis(field: &VectorField, traj: &Trajectory, eta: f64) -> Result<PatternScanReport, LemmaError> {
    scan_trajectory(field, traj, eta, PatternKind::Streamline)
}

/// The four-point curve that contains the pattern exactly once for `η = 1`.
pub fn rigged_curve() -> (Vec<f64>, Vec<Point>) {
    (vec![0.0, 1.0, 2.0, 3.0], vec![[0.0, 0.0], [-1.0, 0.0], [1.0, 0.0], [0.0, 1e-4]])
}
