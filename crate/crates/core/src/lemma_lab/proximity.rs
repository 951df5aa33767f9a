//! Proximity of streamlines and the foliation of the plane by them.
//!
//! `hausdorff` measures the Hausdorff distance between two sampled curves,
//! taking every sample of one curve to the full polyline of the other, and
//! reports how much the sampling alone could hide. `foliation_probe` checks
//! that a point `x` lies on the streamline through the point of the base
//! gradient orbit `Σ₀` at the same level of `u`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::LemmaError;
use crate::field::VectorField;
use crate::geom::{self, Point};
use crate::tracer::{level_hit, trace_streamline, IntegratorConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HausdorffResult {
    pub distance: f64,
    /// `sup_{a ∈ A} d(a, B)` over the samples of `A`.
    pub a_to_b: f64,
    pub b_to_a: f64,
    /// Half the longest segment of either curve: the continuous distance
    /// differs from the sampled one by at most this much.
    pub sampling_error: f64,
}

fn point_to_polyline(p: Point, poly: &[Point]) -> f64 {
    if poly.len() == 1 {
        return geom::dist(p, poly[0]);
    }
    poly.windows(2).map(|w| geom::point_segment_distance(p, w[0], w[1]).0).fold(f64::INFINITY, f64::min)
}

fn directed(a: &[Point], b: &[Point]) -> f64 {
    a.par_iter().map(|&p| point_to_polyline(p, b)).reduce(|| 0.0, f64::max)
}

fn longest_segment(a: &[Point]) -> f64 {
    a.windows(2).map(|w| geom::dist(w[0], w[1])).fold(0.0, f64::max)
}

/// Hausdorff distance between two polylines.
pub fn hausdorff(a: &[Point], b: &[Point]) -> Result<HausdorffResult, LemmaError> {
    if a.is_empty() || b.is_empty() {
        return Err(LemmaError::Invalid("Hausdorff distance of an empty curve".into()));
    }
    let (ab, ba) = (directed(a, b), directed(b, a));
    Ok(HausdorffResult {
        distance: ab.max(ba),
        a_to_b: ab,
        b_to_a: ba,
        sampling_error: 0.5 * longest_segment(a).max(longest_segment(b)),
    })
}

/// The contiguous run of samples inside the closed ball `B(center, r)` that
/// contains the sample nearest to `center`; empty if no sample is inside.
pub fn truncate_to_ball(points: &[Point], center: Point, r: f64) -> Vec<Point> {
    let Some((k, _)) = points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, geom::dist(*p, center)))
        .filter(|(_, d)| *d <= r)
        .min_by(|a, b| a.1.total_cmp(&b.1))
    else {
        return Vec::new();
    };
    let inside = |i: usize| geom::dist(points[i], center) <= r;
    let mut lo = k;
    while lo > 0 && inside(lo - 1) {
        lo -= 1;
    }
    let mut hi = k;
    while hi + 1 < points.len() && inside(hi + 1) {
        hi += 1;
    }
    points[lo..=hi].to_vec()
}

/// One foliation probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoliationRecord {
    pub x: Point,
    /// `u(x)`.
    pub level: f64,
    /// Point of `Σ₀` at the same level.
    pub y: Option<Point>,
    /// Distance from `x` to the streamline through `y`.
    pub distance: Option<f64>,
    /// Why no distance was measured (level out of reach, trace failure).
    pub unreachable: Option<String>,
}

/// For each sample `x`, finds `y ∈ Σ₀` with `u(y) = u(x)` and measures the
/// distance from `x` to the streamline through `y`. Results keep the input
/// order.
pub fn foliation_probe(
    field: &VectorField,
    samples: &[Point],
    cfg: &IntegratorConfig,
) -> Result<Vec<FoliationRecord>, LemmaError> {
    samples
        .par_iter()
        .map(|&x| {
            let level = field.stream(x)?;
            let y = match level_hit(field, [0.0, 0.0], level, cfg) {
                Ok(y) => y,
                Err(e) => {
                    return Ok(FoliationRecord { x, level, y: None, distance: None, unreachable: Some(e.to_string()) })
                }
            };
            match trace_streamline(field, y, cfg) {
                Ok(traj) => {
                    let d = traj.closest_point(x).2;
                    Ok(FoliationRecord { x, level, y: Some(y), distance: Some(d), unreachable: None })
                }
                Err(e) => Ok(FoliationRecord { x, level, y: Some(y), distance: None, unreachable: Some(e.to_string()) }),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Builtin;
    use crate::geom::Rect;

    fn line(y: f64, n: usize) -> Vec<Point> {
        (0..n).map(|i| [-5.0 + 10.0 * i as f64 / (n - 1) as f64, y]).collect()
    }

    #[test]
    fn identical_and_parallel() {
        let a = line(0.0, 101);
        assert_eq!(hausdorff(&a, &a).unwrap().distance, 0.0);
        let r = hausdorff(&a, &line(0.3, 57)).unwrap();
        assert!((r.distance - 0.3).abs() <= r.sampling_error + 1e-12);
        assert!((r.distance - 0.3).abs() < 1e-12);
        assert!(hausdorff(&a, &[]).is_err());
    }

    #[test]
    fn symmetric_and_triangle() {
        let a = line(0.0, 40);
        let b: Vec<Point> = (0..60).map(|i| [-5.0 + i as f64 / 6.0, 0.2 * (i as f64 * 0.3).sin()]).collect();
        let c = line(0.5, 33);
        let (ab, ba) = (hausdorff(&a, &b).unwrap(), hausdorff(&b, &a).unwrap());
        assert_eq!(ab.distance, ba.distance);
        let ac = hausdorff(&a, &c).unwrap();
        let bc = hausdorff(&b, &c).unwrap();
        let slack = ab.sampling_error + bc.sampling_error + ac.sampling_error;
        assert!(ac.distance <= ab.distance + bc.distance + slack);
    }

    #[test]
    fn cosh_streamlines_converge() {
        let f = Builtin::Cosh.build().unwrap();
        let cfg = IntegratorConfig::span(-10.0, 10.0).with_max_step(0.01);
        let base = trace_streamline(&f, [0.0, 1.0], &cfg).unwrap();
        let base = truncate_to_ball(&base.points(), [0.0, 0.0], 5.0);
        let mut prev = f64::INFINITY;
        for gap in [0.01, 0.005, 0.0025] {
            let other = trace_streamline(&f, [0.0, 1.0 + gap], &cfg).unwrap();
            let other = truncate_to_ball(&other.points(), [0.0, 0.0], 5.0);
            let d = hausdorff(&base, &other).unwrap().distance;
            assert!(d < prev && d < 0.2, "gap {gap}: {d}");
            prev = d;
        }
    }

    #[test]
    fn cosh_foliation() {
        let f = Builtin::Cosh.build().unwrap();
        let cfg = IntegratorConfig::span(-20.0, 20.0);
        let recs = foliation_probe(&f, &[[1.0, 1.0]], &cfg).unwrap();
        let y = recs[0].y.unwrap();
        assert!(y[0].abs() < 1e-9 && (y[1] - 1f64.cosh()).abs() < 1e-9);
        assert!(recs[0].distance.unwrap() < 1e-5);
        let far = foliation_probe(&f, &[[7.9, 7.9]], &cfg).unwrap();
        assert!(far[0].unreachable.is_some());
        let pts = super::super::elliptic::sample_points(Rect::square(2.0), 40);
        for r in foliation_probe(&f, &pts, &cfg).unwrap() {
            assert!(r.distance.unwrap() <= 1e-4);
        }
    }

    #[test]
    fn shear_foliation() {
        let f = Builtin::Shear { profile: "2+sin(x2)".into(), angle: 0.0 }.build().unwrap();
        let cfg = IntegratorConfig::span(-20.0, 20.0);
        let recs = foliation_probe(&f, &[[1.5, -0.7]], &cfg).unwrap();
        let y = recs[0].y.unwrap();
        assert!(y[0].abs() < 1e-9 && (y[1] + 0.7).abs() < 1e-9);
        assert!(recs[0].distance.unwrap() < 1e-9);
    }
}
