//! Shear-flow detection on a box.
//!
//! A flow is a shear flow `v(x) = V(x·e⊥) e` exactly when its direction is
//! constant. The detector measures the oscillation of the argument of `v`
//! over the ball circumscribing the box. Below the tolerance it reports the
//! direction `e` and samples the profile `V` along the `e⊥` axis through
//! the box center. Stagnation points in the box void the question and are
//! reported as a violated hypothesis.
//!
//! ```
//! use flowlab::field::Builtin;
//! use flowlab::geom::Rect;
//! use flowlab::lemma_lab::shear::{detect_shear, ShearVerdict};
//!
//! let cosh = Builtin::Cosh.build().unwrap();
//! let v = detect_shear(&cosh, Rect::square(2.0), 1e-6).unwrap();
//! assert!(matches!(v, ShearVerdict::NonShear { .. }));
//! ```

use serde::{Deserialize, Serialize};

use super::LemmaError;
use crate::argument::{branch_field, ArgumentError, Ball, Target};
use crate::field::VectorField;
use crate::geom::{self, Point, Rect};

/// Default oscillation tolerance in radians.
pub const SHEAR_TOL: f64 = 1e-6;
/// Grid for the oscillation and admissibility scans.
const SCAN_GRID: usize = 201;
/// Profile samples along the `e⊥` axis.
const PROFILE_SAMPLES: usize = 201;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ShearVerdict {
    Shear {
        /// Unit vector `e`.
        direction: Point,
        /// Argument of `e` in `(-π, π]`.
        angle: f64,
        /// `(x·e⊥, V)` along the `e⊥` axis through the box center.
        profile: Vec<(f64, f64)>,
        /// `+1` or `-1` when `V` keeps a strict sign, `0` otherwise.
        sign: i8,
        osc: f64,
    },
    NonShear {
        osc: f64,
        speed_max: f64,
    },
    HypothesisViolated {
        reason: String,
    },
}

/// Classifies the flow on `rect` as a shear flow, a non-shear flow, or a
/// flow outside the admissible class.
pub fn detect_shear(field: &VectorField, rect: Rect, tol: f64) -> Result<ShearVerdict, LemmaError> {
    if !rect.is_valid() {
        return Err(LemmaError::Invalid("box must be finite and non-degenerate".into()));
    }
    let bounds = field.estimate_eta(rect, SCAN_GRID)?;
    if !bounds.admissible {
        return Ok(ShearVerdict::HypothesisViolated {
            reason: format!(
                "stagnation point: |v| = {:e} at ({}, {})",
                bounds.eta_lo, bounds.argmin[0], bounds.argmin[1]
            ),
        });
    }
    let center = rect.center();
    let radius = 0.5 * rect.width().hypot(rect.height());
    let branch = match branch_field(field, Ball::new(center, radius), SCAN_GRID, Target::Velocity) {
        Ok(b) => b,
        Err(ArgumentError::Stagnation { at, speed }) => {
            return Ok(ShearVerdict::HypothesisViolated {
                reason: format!("stagnation point near the box: |v| = {speed:e} at ({}, {})", at[0], at[1]),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let osc = branch.osc();
    if osc > tol {
        return Ok(ShearVerdict::NonShear { osc, speed_max: bounds.eta_hi });
    }
    let (lo, _, hi, _) = branch.extremes();
    let angle = crate::argument::principal(0.5 * (lo + hi));
    let e = [angle.cos(), angle.sin()];
    let e_perp = [-e[1], e[0]];
    let mut profile = Vec::with_capacity(PROFILE_SAMPLES);
    for k in 0..PROFILE_SAMPLES {
        let r = -radius + 2.0 * radius * k as f64 / (PROFILE_SAMPLES - 1) as f64;
        let x = geom::add(center, geom::scale(e_perp, r));
        profile.push((geom::dot(x, e_perp), geom::dot(field.velocity(x)?, e)));
    }
    let sign = if profile.iter().all(|p| p.1 > 0.0) {
        1
    } else if profile.iter().all(|p| p.1 < 0.0) {
        -1
    } else {
        0
    };
    Ok(ShearVerdict::Shear { direction: e, angle, profile, sign, osc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Builtin;
    use std::f64::consts::PI;

    #[test]
    fn wavy_shear_detected() {
        let f = Builtin::Shear { profile: "2+sin(x2)".into(), angle: 0.0 }.build().unwrap();
        let ShearVerdict::Shear { direction, profile, sign, .. } = detect_shear(&f, Rect::square(2.0), SHEAR_TOL).unwrap()
        else {
            panic!("expected a shear verdict");
        };
        assert!((direction[0] - 1.0).abs() < 1e-6 && direction[1].abs() < 1e-6);
        for (s, v) in profile {
            assert!((v - (2.0 + s.sin())).abs() < 1e-9);
        }
        assert_eq!(sign, 1);
    }

    #[test]
    fn negative_profile_sign() {
        let f = Builtin::Couette { a: 1.0, b: -5.0 }.build_on(Rect::square(2.0)).unwrap();
        let ShearVerdict::Shear { sign, direction, .. } = detect_shear(&f, Rect::square(1.0), SHEAR_TOL).unwrap() else {
            panic!("expected a shear verdict");
        };
        // v = (x2 - 5, 0) points left; e is reported as (-1, 0) with V > 0.
        assert!((direction[0].abs() - 1.0).abs() < 1e-9);
        assert_eq!(sign, if direction[0] < 0.0 { 1 } else { -1 });
    }

    #[test]
    fn cellular_and_cosh() {
        let cell = Builtin::Cellular { alpha: 1.0, beta: 1.0 }.build().unwrap();
        assert!(matches!(
            detect_shear(&cell, Rect::square(2.0), SHEAR_TOL).unwrap(),
            ShearVerdict::HypothesisViolated { .. }
        ));
        let cosh = Builtin::Cosh.build().unwrap();
        let ShearVerdict::NonShear { osc, .. } = detect_shear(&cosh, Rect::square(1.0), SHEAR_TOL).unwrap() else {
            panic!("expected non-shear");
        };
        assert!(osc > 0.1);
    }

    #[test]
    fn rotation_equivariance() {
        let base = Builtin::Shear { profile: "2+sin(x2)".into(), angle: 0.3 }.build().unwrap();
        let angle_of = |f: &VectorField| match detect_shear(f, Rect::square(2.0), SHEAR_TOL).unwrap() {
            ShearVerdict::Shear { angle, .. } => angle,
            other => panic!("expected shear, got {other:?}"),
        };
        let a0 = angle_of(&base);
        for psi in [0.5, 1.7, -2.2, PI] {
            let rotated = base.rotate(psi).unwrap();
            let d = (angle_of(&rotated) - a0 - psi).rem_euclid(PI);
            assert!(d.min(PI - d) < 1e-6, "psi {psi}: {d}");
        }
    }
}
