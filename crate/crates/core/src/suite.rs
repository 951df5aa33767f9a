//! Verification suites and the end-to-end demo.
//!
//! A suite runs one family of checks on a field and returns [`Record`]s.
//! Random inputs come from a ChaCha8 stream derived from the seed and the
//! suite name, so suites give the same records whichever subset is run.
//!
//! Local checks (pattern scans, single-orbit log bounds) use the field on a
//! probe box around the domain center, with `η` certified on that box.

use std::f64::consts::{LN_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::arcs::{self, census, Curve};
use crate::argument::{check_log_growth, CheckStatus};
use crate::field::{Builtin, FieldError, VectorField};
use crate::geom::{Point, Rect};
use crate::lemma_lab::constants::{c2_floor, constants, omega, partition_params};
use crate::lemma_lab::elliptic::{reconstruct_f, verify_differentiated, verify_semilinear, ReconstructOptions};
use crate::lemma_lab::log_bounds::{check_lemma_log, check_lemma_logbis, LogPairRecord};
use crate::lemma_lab::patterns::{rigged_curve, scan_curve, scan_oneleft, scan_oneleftbis, PatternKind};
use crate::lemma_lab::proximity::foliation_probe;
use crate::lemma_lab::shear::{detect_shear, ShearVerdict, SHEAR_TOL};
use crate::lemma_lab::LemmaError;
use crate::report::{Record, Report};
use crate::tracer::{trace_gradient, trace_streamline, IntegratorConfig};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Lemma(#[from] LemmaError),
    #[error("{0}")]
    Other(String),
}

impl From<crate::argument::ArgumentError> for SuiteError {
    fn from(e: crate::argument::ArgumentError) -> Self {
        SuiteError::Lemma(e.into())
    }
}

impl From<crate::tracer::TraceError> for SuiteError {
    fn from(e: crate::tracer::TraceError) -> Self {
        SuiteError::Lemma(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Field,
    Elliptic,
    Patterns,
    Foliation,
    Constants,
    LogGrowth,
    Shear,
}

impl Suite {
    pub const VERIFY_ALL: [Suite; 5] =
        [Suite::Elliptic, Suite::Patterns, Suite::Foliation, Suite::Constants, Suite::LogGrowth];

    pub fn parse(s: &str) -> Option<Vec<Suite>> {
        Some(match s {
            "all" => Self::VERIFY_ALL.to_vec(),
            "field" => vec![Suite::Field],
            "elliptic" => vec![Suite::Elliptic],
            "patterns" => vec![Suite::Patterns],
            "foliation" => vec![Suite::Foliation],
            "constants" => vec![Suite::Constants],
            "log-growth" => vec![Suite::LogGrowth],
            "shear" => vec![Suite::Shear],
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Field => "field",
            Suite::Elliptic => "elliptic",
            Suite::Patterns => "patterns",
            Suite::Foliation => "foliation",
            Suite::Constants => "constants",
            Suite::LogGrowth => "log-growth",
            Suite::Shear => "shear",
        }
    }

    fn rng(self, seed: u64) -> ChaCha8Rng {
        let salt = self.as_str().bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
        ChaCha8Rng::seed_from_u64(seed ^ salt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Upper bound for `η`; the certified value is used when smaller.
    pub eta: Option<f64>,
    /// Traced orbits per kind in the pattern scans.
    pub orbits: usize,
    /// Random points for the residual and foliation checks.
    pub points: usize,
    /// Seed/time pairs per kind in the single-orbit log checks.
    pub pairs: usize,
    pub radii: Vec<f64>,
    /// Starting grid of the growth oscillation.
    pub growth_grid: usize,
    /// Residual bound of the semilinear identity.
    pub semilinear_bound: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            eta: None,
            orbits: 20,
            points: 200,
            pairs: 20,
            radii: vec![2.0, 4.0, 8.0, 16.0],
            growth_grid: 101,
            semilinear_bound: 1e-5,
        }
    }
}

impl SuiteConfig {
    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "eta": self.eta,
            "orbits": self.orbits,
            "points": self.points,
            "pairs": self.pairs,
            "radii": self.radii,
            "growth_grid": self.growth_grid,
            "semilinear_bound": self.semilinear_bound,
        })
    }
}

/// Square of half-width `min(2, quarter of the domain's shorter side)` at
/// the domain center.
pub fn probe_box(f: &VectorField) -> Rect {
    let d = f.domain();
    Rect::centered(d.center(), (0.25 * d.width().min(d.height())).min(2.0))
}

/// `η = min(inf |v|, 1/sup |v|, 1)` on `rect`.
pub fn certify_eta(f: &VectorField, rect: Rect) -> Result<f64, SuiteError> {
    let b = f.estimate_eta(rect, 101)?;
    if !b.admissible {
        return Err(SuiteError::Lemma(LemmaError::Hypothesis(format!(
            "stagnation on {rect:?}: |v| = {:e} at ({}, {})",
            b.eta_lo, b.argmin[0], b.argmin[1]
        ))));
    }
    Ok(b.eta)
}

fn eta_on(f: &VectorField, rect: Rect, cfg: &SuiteConfig) -> Result<f64, SuiteError> {
    let c = certify_eta(f, rect)?;
    Ok(cfg.eta.map_or(c, |e| e.min(c)))
}

fn random_points(rng: &mut ChaCha8Rng, rect: Rect, n: usize) -> Vec<Point> {
    (0..n)
        .map(|_| [rng.gen_range(rect.min[0]..rect.max[0]), rng.gen_range(rect.min[1]..rect.max[1])])
        .collect()
}

fn rect_json(r: Rect) -> Value {
    json!({ "min": r.min, "max": r.max })
}

fn named(f: &VectorField, check: &str) -> String {
    format!("{}/{}", f.name(), check)
}

/// Runs the requested suites in order.
pub fn run_suites(f: &VectorField, suites: &[Suite], cfg: &SuiteConfig) -> Result<Vec<Record>, SuiteError> {
    let mut out = Vec::new();
    for &s in suites {
        let mut rng = s.rng(cfg.seed);
        let recs = match s {
            Suite::Field => field_suite(f, &mut rng, cfg)?,
            Suite::Elliptic => elliptic_suite(f, &mut rng, cfg)?,
            Suite::Patterns => patterns_suite(f, &mut rng, cfg)?,
            Suite::Foliation => foliation_suite(f, &mut rng, cfg)?,
            Suite::Constants => constants_suite(eta_on(f, probe_box(f), cfg)?)?,
            Suite::LogGrowth => log_growth_suite(f, &mut rng, cfg)?,
            Suite::Shear => vec![shear_record(f, None)?],
        };
        out.extend(recs);
    }
    Ok(out)
}

/// Euler residual, stream-function consistency and admissibility.
pub fn field_suite(f: &VectorField, rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<Vec<Record>, SuiteError> {
    let mut out = Vec::new();
    let probe = probe_box(f);
    if f.pressure().is_some() {
        let r = f.euler_residual(probe, 41)?;
        out.push(Record::at_most(&named(f, "euler-residual"), "euler-residual", json!({"box": rect_json(probe), "grid": 41}), r, 1e-10));
    }
    let pts = random_points(rng, probe, cfg.points.min(100));
    let (mut grad_err, mut quad_err) = (0.0f64, 0.0f64);
    for &x in &pts {
        let (g, v) = (f.stream_gradient(x)?, f.velocity(x)?);
        grad_err = grad_err.max((g[0] - v[1]).abs()).max((g[1] + v[0]).abs());
        quad_err = quad_err.max((f.stream(x)? - f.stream_by_quadrature(x)?).abs());
    }
    let inputs = json!({"points": pts.len(), "box": rect_json(probe)});
    out.push(Record::at_most(&named(f, "stream-gradient"), "stream-gradient", inputs.clone(), grad_err, 1e-10));
    out.push(Record::at_most(&named(f, "stream-quadrature"), "stream-quadrature", inputs, quad_err, 1e-8));
    Ok(out)
}

/// Reconstruction of `f` and the semilinear identity.
pub fn elliptic_suite(f: &VectorField, rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<Vec<Record>, SuiteError> {
    let rf = match reconstruct_f(f, &ReconstructOptions::default()) {
        Ok(rf) => rf,
        Err(LemmaError::Hypothesis(reason)) => {
            return Ok(vec![Record::skipped(&named(f, "semilinear-residual"), "semilinear-residual", json!({}), reason)])
        }
        Err(e) => return Err(e.into()),
    };
    let probe = probe_box(f);
    let pts = random_points(rng, probe, cfg.points);
    let rep = verify_semilinear(f, &rf, &pts)?;
    let der = verify_differentiated(f, &rf, &pts)?;
    let inputs = json!({"box": rect_json(probe), "points": pts.len(), "skipped": rep.skipped, "s_range": [rf.s_range.0, rf.s_range.1]});
    let mut out = vec![
        Record::at_most(&named(f, "semilinear-residual"), "semilinear-residual", inputs.clone(), rep.max_residual, cfg.semilinear_bound),
        Record::at_most(&named(f, "semilinear-derivative"), "semilinear-derivative", inputs, der.max_residual, 1e-3),
        Record::holds(
            &named(f, "f-range"),
            "f-range",
            json!({"table_size": rf.s.len()}),
            json!([rf.s_range.0, rf.s_range.1]),
            !rf.narrow_range,
        ),
    ];
    if rep.checked == 0 {
        out[0] = Record::skipped(&named(f, "semilinear-residual"), "semilinear-residual", json!({}), "no sample inside the tabulated range");
    }
    Ok(out)
}

/// Forbidden-pattern scans on random orbits plus the detector self-test.
pub fn patterns_suite(f: &VectorField, rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<Vec<Record>, SuiteError> {
    let probe = probe_box(f);
    let local = f.with_domain(probe)?;
    let eta = eta_on(f, probe, cfg)?;
    let seeds = random_points(rng, probe, cfg.orbits);
    let span = IntegratorConfig::span(-5.0, 5.0);
    let mut out = Vec::new();
    for kind in [PatternKind::Gradient, PatternKind::Streamline] {
        let (mut tested, mut candidates, mut skipped, mut violations) = (0u64, 0usize, 0usize, 0usize);
        for &x in &seeds {
            let rep = match kind {
                PatternKind::Gradient => scan_oneleft(&local, &trace_gradient(&local, x, &span)?, eta)?,
                PatternKind::Streamline => scan_oneleftbis(&local, &trace_streamline(&local, x, &span)?, eta)?,
            };
            tested += rep.tested;
            candidates += rep.candidates;
            skipped += rep.hypothesis_skipped;
            violations += rep.violations.len();
        }
        let inputs = json!({
            "orbits": seeds.len(), "eta": eta, "threshold": kind.threshold(eta), "box": rect_json(probe),
            "tested": tested, "candidates": candidates, "hypothesis_skipped": skipped,
        });
        let name = named(f, &format!("pattern-{}", kind.as_str()));
        out.push(Record::at_most(&name, &format!("pattern-{}", kind.as_str()), inputs, violations as f64, 0.0));
    }
    let mut rigged = rigged_record()?;
    rigged.name = named(f, "pattern-detector");
    out.push(rigged);
    Ok(out)
}

/// The scanner must find the planted pattern exactly once.
pub fn rigged_record() -> Result<Record, SuiteError> {
    let shear = Builtin::Shear { profile: "1".into(), angle: 0.0 }.build()?;
    let (ts, pts) = rigged_curve();
    let hits = scan_curve(&shear, &ts, &pts, 1.0, PatternKind::Gradient)?.violations.len();
    Ok(Record::equals("pattern-detector", "pattern-detector", json!({"eta": 1.0, "points": pts}), json!(hits), json!(1)))
}

pub fn foliation_suite(f: &VectorField, rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<Vec<Record>, SuiteError> {
    certify_eta(f, f.domain())?;
    let probe = probe_box(f);
    let pts = random_points(rng, probe, cfg.points.min(100));
    let recs = foliation_probe(f, &pts, &IntegratorConfig::span(-20.0, 20.0))?;
    let reached: Vec<f64> = recs.iter().filter_map(|r| r.distance).collect();
    let unreachable = recs.len() - reached.len();
    let inputs = json!({"points": pts.len(), "unreachable": unreachable, "box": rect_json(probe)});
    let name = named(f, "foliation");
    if reached.is_empty() {
        return Ok(vec![Record::skipped(&name, "foliation", inputs, "no level reached from the base orbit")]);
    }
    let worst = reached.iter().copied().fold(0.0, f64::max);
    Ok(vec![Record::at_most(&name, "foliation", inputs, worst, 1e-4)])
}

/// Lower bounds of the constants and the partition tails at `d = 1`.
pub fn constants_suite(eta: f64) -> Result<Vec<Record>, SuiteError> {
    let c = constants(eta).map_err(LemmaError::from)?;
    let p = partition_params(1.0, eta).map_err(LemmaError::from)?;
    let e2 = eta * eta;
    let inp = json!({"eta": eta});
    let tag = |s: &str| format!("eta={eta}/{s}");
    Ok(vec![
        Record::at_least(&tag("c1-floor"), "c1-floor", inp.clone(), c.c1, 288.0 * PI / e2 / LN_2),
        Record::holds(&tag("c1-margin"), "c1-margin", inp.clone(), json!(c.c1), c.c1 > 96.0 * PI / e2),
        Record::at_least(
            &tag("c2-floor"),
            "c2-floor",
            inp.clone(),
            c.c2,
            (384.0 * PI / (1.0 + omega(eta)).ln()).max(c2_floor(eta)),
        ),
        Record::at_least(&tag("c-eta"), "c-eta", inp.clone(), c.c_eta, 2.0 * (c.c1 + c.c2)),
        Record::holds(
            &tag("partition-tails"),
            "partition-tails",
            json!({"eta": eta, "d": 1.0}),
            json!({"m_dyadic": p.m_dyadic, "m_geometric": p.m_geometric, "n": p.n,
                   "dyadic_tail": p.dyadic_tail, "geometric_tail": p.geometric_tail}),
            p.dyadic_tail_ok && p.geometric_tail_ok,
        ),
    ])
}

fn pair_record(f: &VectorField, kind: &str, eta: f64, recs: &[LogPairRecord]) -> Record {
    let passed = recs.iter().filter(|r| r.status.is_pass()).count();
    let failed = recs.iter().filter(|r| r.status.is_fail()).count();
    let skipped = recs.len() - passed - failed;
    let ratio = recs
        .iter()
        .filter(|r| !matches!(r.status, CheckStatus::Skipped { .. }))
        .map(|r| r.turning / r.bound)
        .fold(0.0, f64::max);
    let inputs = json!({"eta": eta, "pairs": recs.len(), "passed": passed, "skipped": skipped});
    let name = named(f, &format!("log-{kind}"));
    let anchor = format!("log-{kind}");
    if passed + failed == 0 {
        return Record::skipped(&name, &anchor, inputs, "small-ball hypothesis failed at every start point");
    }
    Record::at_most(&name, &anchor, inputs, ratio, 1.0)
}

/// Single-orbit log bounds and the growth of the oscillation in large balls.
pub fn log_growth_suite(f: &VectorField, rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<Vec<Record>, SuiteError> {
    let probe = probe_box(f);
    let local = f.with_domain(probe)?;
    let eta = eta_on(f, probe, cfg)?;
    let seeds: Vec<(Point, f64)> = random_points(rng, probe, cfg.pairs)
        .into_iter()
        .map(|x| (x, rng.gen_range(-3.0..3.0)))
        .collect();
    let mut out = vec![
        pair_record(f, "gradient", eta, &check_lemma_log(&local, eta, &seeds)?),
        pair_record(f, "streamline", eta, &check_lemma_logbis(&local, eta, &seeds)?),
    ];
    if cfg.radii.is_empty() {
        return Ok(out);
    }
    // The small-ball hypothesis looks at B(x, 1) for x in B(0, R).
    let dom = f.domain();
    let (inside, outside): (Vec<f64>, Vec<f64>) =
        cfg.radii.iter().partition(|&&r| dom.contains_rect(&Rect::square(r + 1.0)));
    for r in outside {
        out.push(Record::skipped(
            &named(f, &format!("growth-R{r}")),
            "log-growth",
            json!({"radius": r, "domain": rect_json(dom)}),
            format!("B(0, {}) leaves the field domain", r + 1.0),
        ));
    }
    if inside.is_empty() {
        return Ok(out);
    }
    let r_max = inside.iter().copied().fold(0.0, f64::max);
    let growth_box = Rect::square(r_max + 1.0);
    let eta_g = eta_on(f, growth_box, cfg)?;
    for g in check_log_growth(f, &inside, eta_g, cfg.growth_grid)? {
        let inputs = json!({
            "radius": g.radius, "eta": eta_g, "eta_box": rect_json(growth_box), "grid_spacing": g.grid_spacing,
            "hypothesis_centers": g.hypothesis_centers, "hypothesis_failed_at": g.hypothesis_failed_at,
            "within_bound": g.within_bound,
        });
        out.push(Record::from_check(&named(f, &format!("growth-R{}", g.radius)), "log-growth", inputs, g.osc, g.bound, &g.status));
    }
    Ok(out)
}

fn verdict_name(v: &ShearVerdict) -> &'static str {
    match v {
        ShearVerdict::Shear { .. } => "shear",
        ShearVerdict::NonShear { .. } => "non_shear",
        ShearVerdict::HypothesisViolated { .. } => "hypothesis_violated",
    }
}

/// Shear verdict on the probe box; with `expected`, the verdict must match.
pub fn shear_record(f: &VectorField, expected: Option<&str>) -> Result<Record, SuiteError> {
    let probe = probe_box(f);
    let v = detect_shear(f, probe, SHEAR_TOL)?;
    let name = named(f, "shear-verdict");
    let mut measured = json!({"verdict": verdict_name(&v)});
    match &v {
        ShearVerdict::Shear { angle, sign, osc, profile, .. } => {
            measured["angle"] = json!(angle);
            measured["sign"] = json!(sign);
            measured["osc"] = json!(osc);
            measured["profile_samples"] = json!(profile.len());
        }
        ShearVerdict::NonShear { osc, .. } => measured["osc"] = json!(osc),
        ShearVerdict::HypothesisViolated { reason } => measured["reason"] = json!(reason),
    }
    let inputs = json!({"box": rect_json(probe), "tol": SHEAR_TOL});
    Ok(match expected {
        Some(e) => Record::holds(&name, "shear-verdict", inputs, measured, verdict_name(&v) == e),
        None => Record::holds(&name, "shear-verdict", inputs, measured, true),
    })
}

/// Runs every fixture end to end.
pub fn demo(seed: u64) -> Result<Report, SuiteError> {
    let cfg = SuiteConfig { seed, orbits: 8, points: 200, pairs: 8, ..Default::default() };
    let cellular = Builtin::Cellular { alpha: 1.0, beta: 1.0 }.build()?;
    let cosh = Builtin::Cosh.build()?;
    let shear = Builtin::Shear { profile: "2+sin(x2)".into(), angle: 0.0 }.build()?;
    let couette = Builtin::Couette { a: 1.0, b: 2.0 }.build()?;
    let mut records = Vec::new();

    // Cellular: an Euler solution outside the admissible class.
    records.extend(run_suites(&cellular, &[Suite::Field], &cfg)?);
    records.push(shear_record(&cellular, Some("hypothesis_violated"))?);
    let refused = matches!(reconstruct_f(&cellular, &ReconstructOptions::default()), Err(LemmaError::Hypothesis(_)));
    records.push(Record::holds("cellular/elliptic-refused", "semilinear-residual", json!({}), json!(refused), refused));

    // Cosh: admissible locally, unbounded, not a shear flow.
    records.extend(run_suites(
        &cosh,
        &[Suite::Field, Suite::Elliptic, Suite::Patterns, Suite::Foliation, Suite::LogGrowth],
        &SuiteConfig { semilinear_bound: 1e-6, ..cfg.clone() },
    )?);
    let rf = reconstruct_f(&cosh, &ReconstructOptions::default())?;
    records.push(Record::at_most("cosh/f-identity", "f-table", json!({"table_size": rf.s.len()}), rf.max_deviation(|s| -s), 1e-6));
    records.push(shear_record(&cosh, Some("non_shear"))?);

    // A genuine shear flow.
    records.extend(run_suites(
        &shear,
        &[Suite::Field, Suite::Elliptic, Suite::Patterns, Suite::Foliation, Suite::LogGrowth],
        &cfg,
    )?);
    records.push(shear_record(&shear, Some("shear"))?);
    if let ShearVerdict::Shear { profile, direction, .. } = detect_shear(&shear, probe_box(&shear), SHEAR_TOL)? {
        let err = profile.iter().map(|(s, v)| (v - (2.0 + s.sin())).abs()).fold(0.0, f64::max);
        records.push(Record::at_most("shear/profile", "shear-profile", json!({"profile": "2+sin(x2)"}), err, 1e-9));
        let dir_err = direction[1].atan2(direction[0]).abs();
        records.push(Record::at_most("shear/direction", "shear-direction", json!({"angle": 0.0}), dir_err, 1e-6));
    }

    // Couette: f is the constant 1.
    let rf = reconstruct_f(&couette, &ReconstructOptions::default())?;
    records.push(Record::at_most("couette/f-identity", "f-table", json!({"a": 1.0, "b": 2.0}), rf.max_deviation(|_| 1.0), 1e-9));

    for eta in [1.0, 0.75, 0.5, 0.25] {
        records.extend(constants_suite(eta)?);
    }
    let p = partition_params(1.0, 1.0).map_err(LemmaError::from)?;
    records.push(Record::equals("partition/d=1,eta=1", "partition-integers", json!({"d": 1.0, "eta": 1.0}), json!([p.m_dyadic, p.n]), json!([2, 3])));

    let spiral = Curve::from_polyline(arcs::fixtures::two_arm_spiral(3, 400)).map_err(|e| SuiteError::Other(e.to_string()))?;
    let (a, b) = spiral.t_range();
    let c = census(&spiral, a, b).map_err(|e| SuiteError::Other(e.to_string()))?;
    records.push(Record::equals("arcs/spiral-double", "arc-census", json!({"half_turns": 3}), json!(c.n_double), json!(3)));
    records.push(Record::holds(
        "arcs/spiral-bound",
        "arc-bound",
        json!({"half_turns": 3}),
        json!({"theta_delta": c.theta_delta, "bound": c.bound_value}),
        c.bound_holds,
    ));
    Ok(Report::new("demo", json!({"seed": seed, "suite": cfg.to_json()}), records))
}
