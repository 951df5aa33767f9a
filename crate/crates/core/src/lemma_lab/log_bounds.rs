//! Logarithmic bounds on the turning of `∇u` along a single orbit.
//!
//! For a start point `x` and a time `τ`, the orbit through `x` is traced to
//! `y = σ(τ)` (gradient flow) or `y = γ(τ)` (streamline) and the branch of
//! the argument transported along it gives `|φ(x) − φ(y)|`. This is compared
//! with `C1(η) ln(3 + |x − y|)` or `C2(η) ln(3 + |x − y|)` once the
//! small-ball hypothesis at `x` has been checked.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::constants::constants;
use super::{unit_ball_osc, LemmaError};
use crate::argument::{unwrap, CheckStatus};
use crate::field::VectorField;
use crate::geom::{self, Point};
use crate::tracer::{trace, IntegratorConfig, TrajectoryKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogPairRecord {
    pub x: Point,
    pub tau: f64,
    /// End point actually reached (the orbit may leave the domain first).
    pub y: Point,
    pub distance: f64,
    /// `|φ(x) − φ(y)|` along the orbit.
    pub turning: f64,
    pub bound: f64,
    /// Oscillation of the argument over `B(x, 1)`.
    pub hypothesis_osc: f64,
    pub status: CheckStatus,
}

fn check_pairs(
    field: &VectorField,
    eta: f64,
    seeds: &[(Point, f64)],
    kind: TrajectoryKind,
) -> Result<Vec<LogPairRecord>, LemmaError> {
    let c = constants(eta)?;
    let (constant, limit) = if kind.is_gradient() { (c.c1, PI / 2.0) } else { (c.c2, PI / 4.0) };
    let mut out = Vec::with_capacity(seeds.len());
    for &(x, tau) in seeds {
        let hyp = unit_ball_osc(field, x)?;
        let span = if tau >= 0.0 { (0.0, tau) } else { (tau, 0.0) };
        let traj = trace(field, x, kind, &IntegratorConfig::span(span.0, span.1))?;
        let end = if tau >= 0.0 { traj.samples().last() } else { traj.samples().first() };
        let y = end.expect("trajectories are never empty").x;
        let turning = unwrap(&traj)?.delta().abs();
        let distance = geom::dist(x, y);
        let bound = constant * (3.0 + distance).ln();
        let status = if hyp >= limit {
            CheckStatus::Skipped {
                reason: format!("osc over B(x,1) = {hyp:.6} is not below {limit:.6}"),
            }
        } else if turning <= bound {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        out.push(LogPairRecord { x, tau, y, distance, turning, bound, hypothesis_osc: hyp, status });
    }
    Ok(out)
}

/// Gradient-orbit version: bound `C1(η) ln(3 + |x − y|)` under
/// `osc_{B(x,1)} φ < π/2`.
pub fn check_lemma_log(field: &VectorField, eta: f64, seeds: &[(Point, f64)]) -> Result<Vec<LogPairRecord>, LemmaError> {
    check_pairs(field, eta, seeds, TrajectoryKind::Gradient)
}

/// Streamline version: bound `C2(η) ln(3 + |x − y|)` under
/// `osc_{B(x,1)} φ < π/4`.
pub fn check_lemma_logbis(field: &VectorField, eta: f64, seeds: &[(Point, f64)]) -> Result<Vec<LogPairRecord>, LemmaError> {
    check_pairs(field, eta, seeds, TrajectoryKind::Streamline)
}
