//! Arcs of a planar curve cut out by the line through two of its points.
//!
//! For a curve `ξ` on `[a, b]` the chord line `L` passes through `ξ(a)` and
//! `ξ(b)`. The parameters where `ξ` leaves `L` form disjoint open intervals;
//! each one traces an arc whose two ends sit on `L`. Comparing the ends with
//! the chord `[ξ(a), ξ(b)]` sorts the arcs into five classes, and the
//! number of left, right and double arcs bounds how far the tangent can
//! turn between `a` and `b`:
//!
//! `|θ(a) - θ(b)| ≤ 16π (N_l + N_r + N_d) + 4π`.
//!
//! ```
//! use flowlab::arcs::{census, Curve};
//!
//! // Two half-waves of a sine over the x-axis chord.
//! let pts: Vec<[f64; 2]> = (0..=200)
//!     .map(|i| {
//!         let x = 2.0 * std::f64::consts::PI * i as f64 / 200.0;
//!         [x, x.sin()]
//!     })
//!     .collect();
//! let curve = Curve::from_polyline(pts).unwrap();
//! let (a, b) = curve.t_range();
//! let c = census(&curve, a, b).unwrap();
//! assert_eq!(c.n_middle, 2);
//! assert!(c.bound_holds);
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::argument::{self, ArgumentError};
use crate::geom::{self, Point};
use crate::tracer::Trajectory;

/// Relative tolerance (times the chord length) for "on the chord line".
pub const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArcsError {
    #[error("curve needs at least two samples")]
    TooShort,
    #[error("sample parameters must be strictly increasing (at index {0})")]
    NonIncreasing(usize),
    #[error("consecutive samples at index {0} and the next one coincide")]
    RepeatedPoint(usize),
    #[error("tangent list has {got} entries for {want} samples")]
    TangentCount { got: usize, want: usize },
    #[error("segments {0} and {1} intersect; the curve is not an embedding")]
    SelfIntersection(usize, usize),
    #[error("parameters must satisfy a < b inside [{lo}, {hi}], got a = {a}, b = {b}")]
    BadParameters { a: f64, b: f64, lo: f64, hi: f64 },
    #[error("the chord is degenerate: xi(a) = xi(b)")]
    DegenerateChord,
    #[error(transparent)]
    Argument(#[from] ArgumentError),
}

/// A sampled curve: strictly increasing parameters, distinct consecutive
/// points, and optionally the exact tangent at each sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    ts: Vec<f64>,
    points: Vec<Point>,
    tangents: Option<Vec<Point>>,
}

impl Curve {
    pub fn new(ts: Vec<f64>, points: Vec<Point>, tangents: Option<Vec<Point>>) -> Result<Self, ArcsError> {
        if points.len() < 2 || ts.len() != points.len() {
            return Err(ArcsError::TooShort);
        }
        if let Some(i) = ts.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(ArcsError::NonIncreasing(i + 1));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(ArcsError::RepeatedPoint(i));
        }
        if let Some(tg) = &tangents {
            if tg.len() != points.len() {
                return Err(ArcsError::TangentCount { got: tg.len(), want: points.len() });
            }
        }
        Ok(Curve { ts, points, tangents })
    }

    /// Polyline with `t = 0, 1, 2, …`; its tangent is taken from the
    /// segment directions.
    pub fn from_polyline(points: Vec<Point>) -> Result<Self, ArcsError> {
        let ts = (0..points.len()).map(|i| i as f64).collect();
        Curve::new(ts, points, None)
    }

    /// Samples of a traced trajectory with their velocities as tangents.
    pub fn from_trajectory(traj: &Trajectory) -> Result<Self, ArcsError> {
        let s = traj.samples();
        Curve::new(
            s.iter().map(|p| p.t).collect(),
            s.iter().map(|p| p.x).collect(),
            Some(s.iter().map(|p| p.velocity).collect()),
        )
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn tangents(&self) -> Option<&[Point]> {
        self.tangents.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.ts[0], self.ts[self.ts.len() - 1])
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| geom::dist(w[0], w[1])).sum()
    }

    /// Point at parameter `t`, linear between samples.
    pub fn point_at(&self, t: f64) -> Point {
        let (i, s) = self.locate(t);
        geom::lerp(self.points[i], self.points[i + 1], s)
    }

    /// Segment index and fraction for parameter `t` (clamped).
    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.ts.len();
        let i = self.ts.partition_point(|&x| x <= t).saturating_sub(1).min(n - 2);
        let s = ((t - self.ts[i]) / (self.ts[i + 1] - self.ts[i])).clamp(0.0, 1.0);
        (i, s)
    }

    /// The part of the curve over `[a, b]`, with interpolated end samples.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Curve, ArcsError> {
        let (lo, hi) = self.t_range();
        if !(a < b && a >= lo && b <= hi) {
            return Err(ArcsError::BadParameters { a, b, lo, hi });
        }
        let mut ts = vec![a];
        let mut pts = vec![self.point_at(a)];
        let mut tg = self.tangents.as_ref().map(|_| vec![self.tangent_at(a)]);
        for (i, &t) in self.ts.iter().enumerate() {
            if t > a && t < b {
                ts.push(t);
                pts.push(self.points[i]);
                if let (Some(out), Some(src)) = (tg.as_mut(), self.tangents.as_ref()) {
                    out.push(src[i]);
                }
            }
        }
        ts.push(b);
        pts.push(self.point_at(b));
        if let Some(out) = tg.as_mut() {
            out.push(self.tangent_at(b));
        }
        // Interpolated ends may coincide with a neighbouring sample.
        let mut keep_ts = vec![ts[0]];
        let mut keep_pts = vec![pts[0]];
        let mut keep_tg = tg.as_ref().map(|v| vec![v[0]]);
        for i in 1..pts.len() {
            if pts[i] == *keep_pts.last().expect("non-empty") {
                continue;
            }
            keep_ts.push(ts[i]);
            keep_pts.push(pts[i]);
            if let (Some(k), Some(v)) = (keep_tg.as_mut(), tg.as_ref()) {
                k.push(v[i]);
            }
        }
        Curve::new(keep_ts, keep_pts, keep_tg)
    }

    fn tangent_at(&self, t: f64) -> Point {
        let tg = self.tangents.as_ref().expect("tangents present");
        let (i, s) = self.locate(t);
        geom::lerp(tg[i], tg[i + 1], s)
    }

    /// First pair of intersecting segments, if any. Adjacent segments only
    /// count when they fold back onto each other.
    pub fn self_intersection(&self) -> Option<(usize, usize)> {
        let p = &self.points;
        let m = p.len() - 1;
        let mut order: Vec<usize> = (0..m).collect();
        let min_x = |i: usize| p[i][0].min(p[i + 1][0]);
        let max_x = |i: usize| p[i][0].max(p[i + 1][0]);
        order.sort_by(|&i, &j| min_x(i).total_cmp(&min_x(j)).then(i.cmp(&j)));
        let mut active: Vec<usize> = Vec::new();
        let mut best: Option<(usize, usize)> = None;
        for &i in &order {
            let x = min_x(i);
            active.retain(|&j| max_x(j) >= x);
            for &j in &active {
                let (lo, hi) = (i.min(j), i.max(j));
                let hit = if hi == lo + 1 {
                    folds_back(p[lo], p[hi], p[hi + 1])
                } else {
                    segments_intersect(p[lo], p[lo + 1], p[hi], p[hi + 1])
                };
                if hit && best.is_none_or(|b| (lo, hi) < b) {
                    best = Some((lo, hi));
                }
            }
            active.push(i);
        }
        best
    }

    pub fn is_embedded(&self) -> bool {
        self.self_intersection().is_none()
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    geom::cross(geom::sub(b, a), geom::sub(c, a))
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Closed segments `[p1, p2]` and `[q1, q2]` share a point.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Consecutive segments `[a, b]`, `[b, c]` overlap beyond their shared point.
fn folds_back(a: Point, b: Point, c: Point) -> bool {
    orient(a, b, c) == 0.0 && geom::dot(geom::sub(a, b), geom::sub(c, b)) > 0.0
}

/// The five arc classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcClass {
    /// Both ends on the closed chord.
    Middle,
    /// The open span of the ends contains `ξ(a)` but not `ξ(b)`.
    Left,
    /// The open span of the ends contains `ξ(b)` but not `ξ(a)`.
    Right,
    /// The open span of the ends contains the whole chord.
    Double,
    /// The ends miss the open chord.
    Exterior,
}

impl ArcClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ArcClass::Middle => "middle",
            ArcClass::Left => "left",
            ArcClass::Right => "right",
            ArcClass::Double => "double",
            ArcClass::Exterior => "exterior",
        }
    }
}

/// Class from the chord coordinates of an arc's two ends, where `ξ(a)`
/// sits at `0` and `ξ(b)` at `1`.
pub fn classify_projections(s: f64, s_prime: f64) -> ArcClass {
    let (lo, hi) = (s.min(s_prime), s.max(s_prime));
    if lo >= 0.0 && hi <= 1.0 {
        ArcClass::Middle
    } else if hi <= 0.0 || lo >= 1.0 {
        ArcClass::Exterior
    } else if lo < 0.0 && hi > 1.0 {
        ArcClass::Double
    } else if lo < 0.0 {
        ArcClass::Left
    } else {
        ArcClass::Right
    }
}

/// One open parameter interval where the curve is off the chord line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcInterval {
    pub k: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub start: Point,
    pub end: Point,
    /// Chord coordinates of the ends (`ξ(a) = 0`, `ξ(b) = 1`), snapped.
    pub s_start: f64,
    pub s_end: f64,
    /// `+1` left of the oriented chord, `-1` right of it.
    pub side: i8,
    pub class: Option<ArcClass>,
}

/// Chord line through `ξ(a)` and `ξ(b)` in normalized coordinates.
#[derive(Debug, Clone, Copy)]
struct Chord {
    origin: Point,
    dir: Point,
    len: f64,
}

impl Chord {
    fn new(a: Point, b: Point) -> Result<Self, ArcsError> {
        let d = geom::sub(b, a);
        let len = geom::norm(d);
        if len == 0.0 {
            return Err(ArcsError::DegenerateChord);
        }
        Ok(Chord { origin: a, dir: d, len })
    }

    /// Signed distance to the line.
    fn offset(&self, p: Point) -> f64 {
        geom::cross(self.dir, geom::sub(p, self.origin)) / self.len
    }

    /// Coordinate along the chord, snapped to `0` and `1` within tolerance.
    fn coordinate(&self, p: Point) -> f64 {
        let s = geom::dot(self.dir, geom::sub(p, self.origin)) / (self.len * self.len);
        if s.abs() <= SNAP_TOL {
            0.0
        } else if (s - 1.0).abs() <= SNAP_TOL {
            1.0
        } else {
            s
        }
    }

    fn side(&self, p: Point) -> i8 {
        let d = self.offset(p);
        if d.abs() <= SNAP_TOL * self.len {
            0
        } else if d > 0.0 {
            1
        } else {
            -1
        }
    }
}

/// A point of the curve on the chord line.
#[derive(Debug, Clone, Copy)]
struct OnLine {
    t: f64,
    x: Point,
}

/// Points of `c` on the chord line, in parameter order: on-line samples
/// plus sign changes located on segments.
fn on_line_points(c: &Curve, chord: &Chord) -> (Vec<OnLine>, Vec<i8>) {
    let sides: Vec<i8> = c.points.iter().map(|&p| chord.side(p)).collect();
    let mut out = Vec::new();
    for i in 0..c.points.len() {
        if sides[i] == 0 {
            out.push(OnLine { t: c.ts[i], x: c.points[i] });
        }
        if i + 1 < c.points.len() && sides[i] * sides[i + 1] == -1 {
            let (p, q) = (c.points[i], c.points[i + 1]);
            let (dp, dq) = (chord.offset(p), chord.offset(q));
            let s = dp / (dp - dq);
            let x = geom::lerp(p, q, s);
            out.push(OnLine { t: c.ts[i] + s * (c.ts[i + 1] - c.ts[i]), x });
        }
    }
    (out, sides)
}

/// Maximal open intervals of `[a, b]` where the curve is off the chord
/// line through `ξ(a)` and `ξ(b)` (unclassified).
pub fn crossing_intervals(c: &Curve, a: f64, b: f64) -> Result<Vec<ArcInterval>, ArcsError> {
    let r = c.restrict(a, b)?;
    let n = r.points.len();
    let chord = Chord::new(r.points[0], r.points[n - 1])?;
    let (events, sides) = on_line_points(&r, &chord);
    let mut out = Vec::new();
    for w in events.windows(2) {
        let (e0, e1) = (w[0], w[1]);
        // Samples strictly between the two on-line points.
        let inner = r.ts.iter().zip(&sides).filter(|(t, _)| **t > e0.t && **t < e1.t).map(|(_, s)| *s);
        let mut side = 0;
        for s in inner {
            if s != 0 {
                side = s;
                break;
            }
        }
        if side == 0 {
            continue;
        }
        out.push(ArcInterval {
            k: out.len(),
            t_start: e0.t,
            t_end: e1.t,
            start: e0.x,
            end: e1.x,
            s_start: chord.coordinate(e0.x),
            s_end: chord.coordinate(e1.x),
            side,
            class: None,
        });
    }
    Ok(out)
}

/// Class of an interval produced by [`crossing_intervals`].
pub fn classify(interval: &ArcInterval) -> ArcClass {
    classify_projections(interval.s_start, interval.s_end)
}

/// Arc counts and the tangent-turning bound on `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcCensus {
    pub a: f64,
    pub b: f64,
    pub n_left: usize,
    pub n_right: usize,
    pub n_double: usize,
    pub n_middle: usize,
    pub n_exterior: usize,
    /// `|θ(a) - θ(b)|` of the unwrapped tangent.
    pub theta_delta: f64,
    /// `16π (N_l + N_r + N_d) + 4π`.
    pub bound_value: f64,
    pub bound_holds: bool,
    pub chord_length: f64,
    pub curve_length: f64,
    pub intervals: Vec<ArcInterval>,
}

impl ArcCensus {
    /// `(middle, left, right, double, exterior)`.
    pub fn counts(&self) -> [usize; 5] {
        [self.n_middle, self.n_left, self.n_right, self.n_double, self.n_exterior]
    }
}

/// `|θ(a) - θ(b)|` over `[a, b]`: from the sampled tangents when present,
/// otherwise from the segment directions.
pub fn theta_delta(c: &Curve, a: f64, b: f64) -> Result<f64, ArcsError> {
    let r = c.restrict(a, b)?;
    let tr = match &r.tangents {
        Some(tg) => argument::unwrap_tangents(&r.ts, tg)?,
        None => argument::unwrap_polyline(&r.points)?,
    };
    Ok(tr.delta().abs())
}

/// Classifies every arc on `[a, b]` and checks the turning bound. The
/// curve over `[a, b]` must be embedded.
pub fn census(c: &Curve, a: f64, b: f64) -> Result<ArcCensus, ArcsError> {
    let r = c.restrict(a, b)?;
    if let Some((i, j)) = r.self_intersection() {
        return Err(ArcsError::SelfIntersection(i, j));
    }
    let mut intervals = crossing_intervals(c, a, b)?;
    let mut counts = [0usize; 5];
    for iv in &mut intervals {
        let class = classify(iv);
        iv.class = Some(class);
        counts[class as usize] += 1;
    }
    let [n_middle, n_left, n_right, n_double, n_exterior] = counts;
    let theta = theta_delta(c, a, b)?;
    let bound = 16.0 * PI * (n_left + n_right + n_double) as f64 + 4.0 * PI;
    let n = r.points.len();
    Ok(ArcCensus {
        a,
        b,
        n_left,
        n_right,
        n_double,
        n_middle,
        n_exterior,
        theta_delta: theta,
        bound_value: bound,
        bound_holds: theta <= bound,
        chord_length: geom::dist(r.points[0], r.points[n - 1]),
        curve_length: r.length(),
        intervals,
    })
}

/// Whether the curve on `[a, b]` avoids the open chord, or avoids the
/// chord line outside the closed chord.
pub fn is_nonintersecting(c: &Curve, a: f64, b: f64) -> Result<bool, ArcsError> {
    let r = c.restrict(a, b)?;
    let n = r.points.len();
    let chord = Chord::new(r.points[0], r.points[n - 1])?;
    let (events, _) = on_line_points(&r, &chord);
    let inner: Vec<f64> = events
        .iter()
        .filter(|e| e.t > a && e.t < b)
        .map(|e| chord.coordinate(e.x))
        .collect();
    // On-line segments: both ends on the line, the whole span is touched.
    let mut spans: Vec<(f64, f64)> = inner.iter().map(|&s| (s, s)).collect();
    let sides: Vec<i8> = r.points.iter().map(|&p| chord.side(p)).collect();
    for i in 0..n - 1 {
        if sides[i] == 0 && sides[i + 1] == 0 {
            let (s0, s1) = (chord.coordinate(r.points[i]), chord.coordinate(r.points[i + 1]));
            spans.push((s0.min(s1), s0.max(s1)));
        }
    }
    let misses_open_chord = spans.iter().all(|&(lo, hi)| hi <= 0.0 || lo >= 1.0);
    let stays_on_chord = spans.iter().all(|&(lo, hi)| lo >= 0.0 && hi <= 1.0);
    Ok(misses_open_chord || stays_on_chord)
}

/// Random embedded polylines and the spiral fixture used by tests,
/// examples and the CLI demo.
pub mod fixtures {
    use rand::Rng;

    use super::*;

    /// A random walk with bounded turning, rejecting steps that would make
    /// it self-intersect. Returns between 3 and `max_vertices` vertices.
    pub fn random_polyline<R: Rng>(rng: &mut R, max_vertices: usize) -> Vec<Point> {
        let target = rng.gen_range(3..=max_vertices.max(3));
        let mut pts = vec![[0.0, 0.0]];
        let mut heading: f64 = rng.gen_range(-PI..PI);
        let turn = rng.gen_range(0.3..2.8);
        let mut fails = 0;
        while pts.len() < target && fails < 200 {
            let h = heading + rng.gen_range(-turn..turn);
            let step = rng.gen_range(0.2..1.5);
            let last = *pts.last().expect("non-empty");
            let next = [last[0] + step * h.cos(), last[1] + step * h.sin()];
            let m = pts.len();
            let clash = (0..m.saturating_sub(2)).any(|i| segments_intersect(pts[i], pts[i + 1], last, next))
                || (m >= 2 && folds_back(pts[m - 2], last, next));
            if clash {
                fails += 1;
                continue;
            }
            fails = 0;
            heading = h;
            pts.push(next);
        }
        pts
    }

    /// An arc of a random ellipse spanning less than a full turn.
    pub fn random_convex_arc<R: Rng>(rng: &mut R, vertices: usize) -> Vec<Point> {
        let (rx, ry) = (rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0));
        let rot: f64 = rng.gen_range(0.0..PI);
        let start: f64 = rng.gen_range(0.0..2.0 * PI);
        let span = rng.gen_range(0.3..1.9 * PI);
        let c = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        (0..vertices)
            .map(|i| {
                let t = start + span * i as f64 / (vertices - 1) as f64;
                geom::add(c, geom::rotate([rx * t.cos(), ry * t.sin()], rot))
            })
            .collect()
    }

    /// Two interleaved Archimedean arms around the chord `[(0,0), (1,0)]`.
    ///
    /// The curve starts at `(0, 0)`, winds outward on `r = θ/(2π)` about
    /// `(0.5, 0)` for `θ ∈ [π, (J + ½)π]`, steps out to the second arm
    /// `r = θ/(2π) + ½` and winds back in to `(1, 0)` at `θ = 0`. The arms
    /// never meet, and the chord line is crossed so that there are exactly
    /// `2J - 3` double arcs (`J ≥ 2`).
    pub fn two_arm_spiral(half_turns: usize, per_turn: usize) -> Vec<Point> {
        let j = half_turns.max(2) as f64;
        let center = [0.5, 0.0];
        let at = |theta: f64, r: f64| geom::add(center, [r * theta.cos(), r * theta.sin()]);
        let end = (j + 0.5) * PI;
        let n1 = ((end - PI) / (2.0 * PI) * per_turn as f64).ceil() as usize;
        let n2 = (end / (2.0 * PI) * per_turn as f64).ceil() as usize;
        let mut pts: Vec<Point> = (0..=n1)
            .map(|i| {
                let th = PI + (end - PI) * i as f64 / n1 as f64;
                at(th, th / (2.0 * PI))
            })
            .collect();
        pts.extend((0..=n2).map(|i| {
            let th = end * (1.0 - i as f64 / n2 as f64);
            at(th, th / (2.0 * PI) + 0.5)
        }));
        // Pin the chord ends exactly.
        pts[0] = [0.0, 0.0];
        let last = pts.len() - 1;
        pts[last] = [1.0, 0.0];
        pts
    }
}
