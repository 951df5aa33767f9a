//! Streamline and gradient-flow tracing.
//!
//! Orbits of `γ' = v(γ)`, `σ' = ∇u(σ)` and their unit-speed variants are
//! integrated with the Dormand–Prince 5(4) pair. The state is augmented with
//! the arc length so that arc-length stops are located as accurately as
//! geometric ones. Events (leaving the domain box, leaving a region,
//! reaching a level of `u`, reaching an arc length, stagnation) are located
//! by bisection on re-integrated single steps, so the recorded end point is
//! the event point itself rather than the first step past it.
//!
//! ```
//! use flowlab::field::Builtin;
//! use flowlab::tracer::{trace_gradient, IntegratorConfig};
//!
//! let cosh = Builtin::Cosh.build().unwrap();
//! let traj = trace_gradient(&cosh, [0.0, 0.0], &IntegratorConfig::span(0.0, 2.0)).unwrap();
//! let end = traj.samples().last().unwrap();
//! assert!((end.x[1] - 2.0).abs() < 1e-9 && (end.u - 2.0).abs() < 1e-9);
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, VectorField, STAGNATION_TOL};
use crate::geom::{self, Point, Rect, Region};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("start point {0:?} lies outside the domain box")]
    OutsideDomain(Point),
    #[error("trajectory never leaves the region within its span")]
    NoExit,
    #[error("level {lambda} not reached; u ranged over [{lo}, {hi}] on the traced span")]
    LevelNotReached { lambda: f64, lo: f64, hi: f64 },
    #[error("empty trajectory")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    Streamline,
    Gradient,
    StreamlineArclength,
    GradientArclength,
}

impl TrajectoryKind {
    pub fn is_gradient(self) -> bool {
        matches!(self, TrajectoryKind::Gradient | TrajectoryKind::GradientArclength)
    }

    pub fn is_arclength(self) -> bool {
        matches!(self, TrajectoryKind::StreamlineArclength | TrajectoryKind::GradientArclength)
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "streamline" => TrajectoryKind::Streamline,
            "gradient" => TrajectoryKind::Gradient,
            "streamline_arclength" | "streamline-arclength" => TrajectoryKind::StreamlineArclength,
            "gradient_arclength" | "gradient-arclength" => TrajectoryKind::GradientArclength,
            _ => return None,
        })
    }
}

/// Optional stopping rule in addition to the time span and domain box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stop", rename_all = "snake_case")]
pub enum StopCondition {
    Exit { region: Region },
    Level { lambda: f64 },
    ArcLength { length: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// `(t0, t1)` with `t0 ≤ 0 ≤ t1`; the start point sits at `t = 0`.
    pub t_span: (f64, f64),
    pub stop: Option<StopCondition>,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            max_step: 0.05,
            t_span: (-10.0, 10.0),
            stop: None,
            max_steps: 500_000,
        }
    }
}

impl IntegratorConfig {
    pub fn span(t0: f64, t1: f64) -> Self {
        IntegratorConfig { t_span: (t0, t1), ..Default::default() }
    }

    pub fn with_stop(mut self, stop: StopCondition) -> Self {
        self.stop = Some(stop);
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self
    }

    fn validate(&self) -> Result<(), TraceError> {
        let bad = |m: &str| Err(TraceError::InvalidConfig(m.into()));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.max_step > 0.0) {
            return bad("max_step must be positive");
        }
        let (a, b) = self.t_span;
        if !(a.is_finite() && b.is_finite()) || a > 0.0 || b < 0.0 {
            return bad("t_span must be finite and contain 0");
        }
        Ok(())
    }
}

/// One accepted point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: Point,
    /// Right-hand side of the traced ODE at `x`.
    pub velocity: Point,
    pub u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    DomainExit,
    RegionExit,
    LevelReached,
    ArcLengthReached,
    Stagnation,
    SpanEnd,
    MaxSteps,
    StepUnderflow,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::DomainExit => "domain_exit",
            EventKind::RegionExit => "region_exit",
            EventKind::LevelReached => "level_reached",
            EventKind::ArcLengthReached => "arc_length_reached",
            EventKind::Stagnation => "stagnation",
            EventKind::SpanEnd => "span_end",
            EventKind::MaxSteps => "max_steps",
            EventKind::StepUnderflow => "step_underflow",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub t: f64,
    pub x: Point,
}

/// A traced orbit: samples with strictly increasing `t`, the start point at
/// `t = 0`, and the event that ended each direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub field: String,
    samples: Vec<Sample>,
    events: Vec<Event>,
}

type State = [f64; 3];

struct Rhs<'a> {
    field: &'a VectorField,
    kind: TrajectoryKind,
}

impl Rhs<'_> {
    fn direction(&self, x: Point) -> Result<Point, FieldError> {
        let v = self.field.velocity(x)?;
        let d = if self.kind.is_gradient() { [v[1], -v[0]] } else { v };
        if self.kind.is_arclength() {
            let n = geom::norm(d);
            if n < STAGNATION_TOL {
                return Ok([0.0, 0.0]);
            }
            return Ok([d[0] / n, d[1] / n]);
        }
        Ok(d)
    }

    fn eval(&self, y: &State) -> Result<State, FieldError> {
        let d = self.direction([y[0], y[1]])?;
        let ds = if self.kind.is_arclength() { geom::norm(d).min(1.0) } else { geom::norm(d) };
        Ok([d[0], d[1], ds])
    }
}

const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Step {
    y: State,
    err: State,
    k_end: State,
}

fn combine(y: &State, h: f64, ks: &[State], coeffs: &[f64]) -> State {
    let mut out = *y;
    for (k, &a) in ks.iter().zip(coeffs) {
        for i in 0..3 {
            out[i] += h * a * k[i];
        }
    }
    out
}

fn dp5_step(rhs: &Rhs<'_>, y: &State, k1: &State, h: f64) -> Result<Step, FieldError> {
    let k2 = rhs.eval(&combine(y, h, &[*k1], &A2))?;
    let k3 = rhs.eval(&combine(y, h, &[*k1, k2], &A3))?;
    let k4 = rhs.eval(&combine(y, h, &[*k1, k2, k3], &A4))?;
    let k5 = rhs.eval(&combine(y, h, &[*k1, k2, k3, k4], &A5))?;
    let k6 = rhs.eval(&combine(y, h, &[*k1, k2, k3, k4, k5], &A6))?;
    let y5 = combine(y, h, &[*k1, k2, k3, k4, k5, k6], &B);
    let k7 = rhs.eval(&y5)?;
    let ks = [*k1, k2, k3, k4, k5, k6, k7];
    let mut err = [0.0; 3];
    for (k, &e) in ks.iter().zip(&E) {
        for i in 0..3 {
            err[i] += h * e * k[i];
        }
    }
    Ok(Step { y: y5, err, k_end: k7 })
}

/// Event functions: negative before the event, positive after it.
struct Events<'a> {
    field: &'a VectorField,
    domain: Rect,
    stop: Option<StopCondition>,
    level_sign: f64,
}

impl Events<'_> {
    fn values(&self, y: &State) -> Result<[(EventKind, f64); 2], FieldError> {
        let x = [y[0], y[1]];
        let domain = (EventKind::DomainExit, self.domain.signed_exit(x));
        let stop = match self.stop {
            None => (EventKind::SpanEnd, -1.0),
            Some(StopCondition::Exit { region }) => (EventKind::RegionExit, region.level(x)),
            Some(StopCondition::Level { lambda }) => {
                (EventKind::LevelReached, self.level_sign * (self.field.stream(x)? - lambda))
            }
            Some(StopCondition::ArcLength { length }) => (EventKind::ArcLengthReached, y[2] - length),
        };
        Ok([domain, stop])
    }
}

fn sample_at(rhs: &Rhs<'_>, t: f64, y: &State, k: &State) -> Result<Sample, FieldError> {
    let x = [y[0], y[1]];
    Ok(Sample { t, x, velocity: [k[0], k[1]], u: rhs.field.stream(x)? })
}

/// Integrates from `t = 0` towards `t_end` (either sign).
fn integrate_direction(
    rhs: &Rhs<'_>,
    events: &Events<'_>,
    x0: Point,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<(Vec<Sample>, Event), TraceError> {
    let dir = if t_end >= 0.0 { 1.0 } else { -1.0 };
    let mut y: State = [x0[0], x0[1], 0.0];
    let mut k = rhs.eval(&y)?;
    let mut t = 0.0;
    let mut out = vec![sample_at(rhs, t, &y, &k)?];
    let end = |kind, t, y: &State| Event { kind, t, x: [y[0], y[1]] };
    if geom::norm([k[0], k[1]]) < STAGNATION_TOL || (rhs.kind.is_arclength() && k[2] == 0.0) {
        return Ok((out, end(EventKind::Stagnation, t, &y)));
    }
    if t_end == 0.0 {
        return Ok((out, end(EventKind::SpanEnd, t, &y)));
    }
    let mut g_prev = events.values(&y)?;
    if g_prev.iter().any(|(_, g)| *g >= 0.0) {
        let kind = g_prev.iter().find(|(_, g)| *g >= 0.0).expect("some").0;
        return Ok((out, end(kind, t, &y)));
    }

    let speed = geom::norm([k[0], k[1]]).max(1e-300);
    let mut h = (0.01 * (1.0 + geom::norm(x0)) / speed).min(cfg.max_step).min(t_end.abs());
    let mut steps = 0usize;
    loop {
        if steps >= cfg.max_steps {
            return Ok((out, end(EventKind::MaxSteps, t, &y)));
        }
        let remaining = (t_end - t).abs();
        let hh = h.min(remaining).min(cfg.max_step);
        if hh <= 1e-14 * t.abs().max(1.0) {
            if remaining <= 1e-14 * t.abs().max(1.0) {
                return Ok((out, end(EventKind::SpanEnd, t, &y)));
            }
            return Ok((out, end(EventKind::StepUnderflow, t, &y)));
        }
        let step = dp5_step(rhs, &y, &k, dir * hh)?;
        let mut err = 0.0f64;
        for i in 0..3 {
            let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(step.y[i].abs());
            err = err.max((step.err[i] / sc).abs());
        }
        if !err.is_finite() || err > 1.0 {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.2 };
            h = hh * fac;
            continue;
        }
        steps += 1;
        let t_new = if hh == remaining { t_end } else { t + dir * hh };
        let g_new = events.values(&step.y)?;
        let fired: Vec<usize> = (0..2).filter(|&i| g_prev[i].1 < 0.0 && g_new[i].1 >= 0.0).collect();
        if !fired.is_empty() {
            let mut best: Option<(f64, State, State, EventKind)> = None;
            for i in fired {
                let (tau, ys) = locate(rhs, events, &y, &k, dir * hh, i)?;
                if best.as_ref().is_none_or(|b| tau.abs() < b.0.abs()) {
                    let ks = rhs.eval(&ys)?;
                    best = Some((tau, ys, ks, g_new[i].0));
                }
            }
            let (tau, ys, ks, kind) = best.expect("fired");
            let te = t + tau;
            let s = sample_at(rhs, te, &ys, &ks)?;
            if te != t {
                out.push(s);
            } else {
                *out.last_mut().expect("non-empty") = s;
            }
            return Ok((out, end(kind, te, &ys)));
        }
        t = t_new;
        y = step.y;
        k = step.k_end;
        g_prev = g_new;
        out.push(sample_at(rhs, t, &y, &k)?);
        if geom::norm([k[0], k[1]]) < STAGNATION_TOL {
            return Ok((out, end(EventKind::Stagnation, t, &y)));
        }
        if t == t_end {
            return Ok((out, end(EventKind::SpanEnd, t, &y)));
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = hh * fac;
    }
}

/// Bisection for the first sign change of event `i` within one step,
/// re-integrating a single Dormand–Prince step for each trial length.
fn locate(
    rhs: &Rhs<'_>,
    events: &Events<'_>,
    y0: &State,
    k0: &State,
    h: f64,
    i: usize,
) -> Result<(f64, State), FieldError> {
    let (mut lo, mut hi) = (0.0f64, h);
    let mut y_hi = dp5_step(rhs, y0, k0, h)?.y;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let ym = dp5_step(rhs, y0, k0, mid)?.y;
        if events.values(&ym)?[i].1 >= 0.0 {
            hi = mid;
            y_hi = ym;
        } else {
            lo = mid;
        }
        if (hi - lo).abs() <= 1e-15 * (1.0 + hi.abs()) {
            break;
        }
    }
    Ok((hi, y_hi))
}

/// Traces the orbit of the given kind through `x0`.
pub fn trace(
    field: &VectorField,
    x0: Point,
    kind: TrajectoryKind,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, TraceError> {
    cfg.validate()?;
    let domain = field.domain();
    if !domain.contains(x0) {
        return Err(TraceError::OutsideDomain(x0));
    }
    let rhs = Rhs { field, kind };
    let level_sign = match cfg.stop {
        Some(StopCondition::Level { lambda }) => {
            let u0 = field.stream(x0)?;
            if u0 < lambda {
                1.0
            } else {
                -1.0
            }
        }
        _ => 1.0,
    };
    let events = Events { field, domain, stop: cfg.stop, level_sign };
    let (back, back_event) = integrate_direction(&rhs, &events, x0, cfg.t_span.0, cfg)?;
    let (fwd, fwd_event) = integrate_direction(&rhs, &events, x0, cfg.t_span.1, cfg)?;
    let mut samples: Vec<Sample> = back.into_iter().rev().collect();
    samples.extend(fwd.into_iter().skip(1));
    let mut events = Vec::new();
    if cfg.t_span.0 < 0.0 {
        events.push(back_event);
    }
    if cfg.t_span.1 > 0.0 || cfg.t_span.0 == 0.0 {
        events.push(fwd_event);
    }
    Ok(Trajectory { kind, field: field.name().to_string(), samples, events })
}

/// Streamline `γ' = v(γ)`, `γ(0) = x0`.
pub fn trace_streamline(f: &VectorField, x0: Point, cfg: &IntegratorConfig) -> Result<Trajectory, TraceError> {
    trace(f, x0, TrajectoryKind::Streamline, cfg)
}

/// Gradient orbit `σ' = ∇u(σ)`, `σ(0) = x0`.
pub fn trace_gradient(f: &VectorField, x0: Point, cfg: &IntegratorConfig) -> Result<Trajectory, TraceError> {
    trace(f, x0, TrajectoryKind::Gradient, cfg)
}

/// Unit-speed streamline (`gradient = false`) or gradient orbit.
pub fn trace_arclength(
    f: &VectorField,
    x0: Point,
    gradient: bool,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, TraceError> {
    let kind = if gradient { TrajectoryKind::GradientArclength } else { TrajectoryKind::StreamlineArclength };
    trace(f, x0, kind, cfg)
}

/// Traces many seeds in parallel; results keep the seed order.
pub fn trace_many(
    f: &VectorField,
    seeds: &[Point],
    kind: TrajectoryKind,
    cfg: &IntegratorConfig,
) -> Vec<Result<Trajectory, TraceError>> {
    seeds.par_iter().map(|&x| trace(f, x, kind, cfg)).collect()
}

/// The point on the gradient orbit through `start` where `u = λ`.
///
/// Integrates until the level is bracketed, locates it by bisection, then
/// polishes with Newton steps along `∇u`.
pub fn level_hit(
    f: &VectorField,
    start: Point,
    lambda: f64,
    cfg: &IntegratorConfig,
) -> Result<Point, TraceError> {
    let u0 = f.stream(start)?;
    if u0 == lambda {
        return Ok(start);
    }
    let span = cfg.t_span.0.abs().max(cfg.t_span.1.abs()).max(1.0);
    let mut c = *cfg;
    c.t_span = if u0 < lambda { (0.0, span) } else { (-span, 0.0) };
    c.stop = Some(StopCondition::Level { lambda });
    let traj = trace(f, start, TrajectoryKind::Gradient, &c)?;
    let hit = traj.events.iter().find(|e| e.kind == EventKind::LevelReached);
    let Some(hit) = hit else {
        let (lo, hi) = traj
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s.u), b.max(s.u)));
        return Err(TraceError::LevelNotReached { lambda, lo, hi });
    };
    let mut x = hit.x;
    for _ in 0..4 {
        let r = lambda - f.stream(x)?;
        if r == 0.0 {
            break;
        }
        let g = f.grad_u(x)?;
        let g2 = geom::dot(g, g);
        if g2 == 0.0 {
            break;
        }
        x = geom::add(x, geom::scale(g, r / g2));
    }
    Ok(x)
}

fn hermite(s0: &Sample, s1: &Sample, t: f64) -> Point {
    let h = s1.t - s0.t;
    let th = (t - s0.t) / h;
    let (h00, h10, h01, h11) = (
        (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th),
        th * (1.0 - th) * (1.0 - th),
        th * th * (3.0 - 2.0 * th),
        th * th * (th - 1.0),
    );
    let mut out = [0.0; 2];
    for i in 0..2 {
        out[i] = h00 * s0.x[i] + h10 * h * s0.velocity[i] + h01 * s1.x[i] + h11 * h * s1.velocity[i];
    }
    out
}

fn hermite_derivative(s0: &Sample, s1: &Sample, t: f64) -> Point {
    let h = s1.t - s0.t;
    let th = (t - s0.t) / h;
    let (d00, d10, d01, d11) = (
        6.0 * th * th - 6.0 * th,
        3.0 * th * th - 4.0 * th + 1.0,
        -6.0 * th * th + 6.0 * th,
        3.0 * th * th - 2.0 * th,
    );
    let mut out = [0.0; 2];
    for i in 0..2 {
        out[i] = (d00 * s0.x[i] + d01 * s1.x[i]) / h + d10 * s0.velocity[i] + d11 * s1.velocity[i];
    }
    out
}

impl Trajectory {
    /// Builds a trajectory from externally produced samples (for instance a
    /// CSV file). Samples must have strictly increasing `t`.
    pub fn from_samples(
        kind: TrajectoryKind,
        field: impl Into<String>,
        samples: Vec<Sample>,
        events: Vec<Event>,
    ) -> Result<Self, TraceError> {
        if samples.is_empty() {
            return Err(TraceError::Empty);
        }
        if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(TraceError::InvalidConfig("sample times must be strictly increasing".into()));
        }
        Ok(Trajectory { kind, field: field.into(), samples, events })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn points(&self) -> Vec<Point> {
        self.samples.iter().map(|s| s.x).collect()
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.samples[0].t, self.samples[self.samples.len() - 1].t)
    }

    /// Index `i` with `t_i ≤ t ≤ t_{i+1}` (clamped to the ends).
    fn segment_index(&self, t: f64) -> usize {
        let n = self.samples.len();
        if n < 2 {
            return 0;
        }
        let i = self.samples.partition_point(|s| s.t <= t);
        i.saturating_sub(1).min(n - 2)
    }

    /// Dense output: cubic Hermite interpolation between samples.
    pub fn state_at(&self, t: f64) -> Point {
        if self.samples.len() == 1 {
            return self.samples[0].x;
        }
        let i = self.segment_index(t);
        hermite(&self.samples[i], &self.samples[i + 1], t)
    }

    /// Derivative of the dense output.
    pub fn derivative_at(&self, t: f64) -> Point {
        if self.samples.len() == 1 {
            return self.samples[0].velocity;
        }
        let i = self.segment_index(t);
        hermite_derivative(&self.samples[i], &self.samples[i + 1], t)
    }

    /// Sum of chord lengths between consecutive samples.
    pub fn polyline_length(&self) -> f64 {
        self.samples.windows(2).map(|w| geom::dist(w[0].x, w[1].x)).sum()
    }

    /// Samples with `t` in `[a, b]`, with interpolated end points.
    pub fn restrict(&self, a: f64, b: f64) -> Vec<Sample> {
        let mut out = Vec::new();
        let at = |t: f64| {
            let x = self.state_at(t);
            let v = self.derivative_at(t);
            Sample { t, x, velocity: v, u: f64::NAN }
        };
        let mut first = at(a);
        if let Some(s) = self.samples.iter().find(|s| s.t == a) {
            first = *s;
        }
        out.push(first);
        out.extend(self.samples.iter().filter(|s| s.t > a && s.t < b).copied());
        if b > a {
            let mut last = at(b);
            if let Some(s) = self.samples.iter().find(|s| s.t == b) {
                last = *s;
            }
            out.push(last);
        }
        out
    }

    /// First crossing of the region boundary after the first sample.
    pub fn first_exit(&self, region: &Region) -> Result<(f64, Point), TraceError> {
        self.first_exit_from(region, self.samples[0].t)
    }

    /// First crossing of the region boundary at or after `t_start`.
    pub fn first_exit_from(&self, region: &Region, t_start: f64) -> Result<(f64, Point), TraceError> {
        let start = self.segment_index(t_start);
        let mut prev_t = t_start;
        if region.level(self.state_at(t_start)) > 0.0 {
            return Err(TraceError::InvalidConfig("trajectory starts outside the region".into()));
        }
        for s in &self.samples[start..] {
            if s.t <= t_start {
                continue;
            }
            if region.level(s.x) > 0.0 {
                let (mut lo, mut hi) = (prev_t, s.t);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid == lo || mid == hi {
                        break;
                    }
                    if region.level(self.state_at(mid)) > 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Ok((hi, self.state_at(hi)));
            }
            prev_t = s.t;
        }
        Err(TraceError::NoExit)
    }

    /// Closest point of the dense curve to `p`: `(t, point, distance)`.
    pub fn closest_point(&self, p: Point) -> (f64, Point, f64) {
        let n = self.samples.len();
        if n == 1 {
            return (self.samples[0].t, self.samples[0].x, geom::dist(p, self.samples[0].x));
        }
        let mut best = (f64::INFINITY, 0usize);
        for i in 0..n - 1 {
            let (d, _) = geom::point_segment_distance(p, self.samples[i].x, self.samples[i + 1].x);
            if d < best.0 {
                best = (d, i);
            }
        }
        let mut out = (self.samples[best.1].t, self.samples[best.1].x, f64::INFINITY);
        let lo = best.1.saturating_sub(1);
        let hi = (best.1 + 1).min(n - 2);
        for i in lo..=hi {
            let (a, b) = (self.samples[i].t, self.samples[i + 1].t);
            let dist = |t: f64| geom::dist(p, self.state_at(t));
            let t = golden_min(dist, a, b, 1e-14 * (1.0 + b.abs()));
            for cand in [a, t, b] {
                let d = dist(cand);
                if d < out.2 {
                    out = (cand, self.state_at(cand), d);
                }
            }
        }
        out
    }
}

/// Golden-section search for a minimum of a unimodal function on `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests;
