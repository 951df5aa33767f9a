//! Numerical checks of the structure of admissible flows: semilinear
//! reconstruction, forbidden-pattern scans, streamline proximity and foliation, shear
//! detection, logarithmic argument estimates, and the explicit constants.
//!
//! Every check is falsification-style: it samples, measures and compares
//! against a bound, and reports hypothesis failures instead of asserting
//! conclusions that do not apply.

use thiserror::Error;

use crate::argument::ArgumentError;
use crate::field::FieldError;
use crate::tracer::TraceError;

pub mod constants;
pub mod elliptic;
pub mod log_bounds;
pub mod patterns;
pub mod proximity;
pub mod shear;

pub use constants::{constants, partition_params, ConstantsReport, PartitionParams};
pub use elliptic::{reconstruct_f, verify_semilinear, ReconstructOptions, ReconstructedF, SemilinearReport};
pub use log_bounds::{check_lemma_log, check_lemma_logbis, LogPairRecord};
pub use patterns::{scan_curve, scan_oneleft, scan_oneleftbis, PatternKind, PatternScanReport};
pub use proximity::{foliation_probe, hausdorff, FoliationRecord, HausdorffResult};
pub use shear::{detect_shear, ShearVerdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LemmaError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Argument(#[from] ArgumentError),
    #[error(transparent)]
    Constants(#[from] constants::ConstantsError),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Oscillation of the flow's argument over `B(x, 1)` on the hypothesis grid;
/// a stagnation point in the ball counts as unbounded oscillation.
pub fn unit_ball_osc(field: &crate::field::VectorField, x: crate::geom::Point) -> Result<f64, LemmaError> {
    use crate::argument::{oscillation_fixed, Ball, Target, HYPOTHESIS_GRID};
    match oscillation_fixed(field, Ball::new(x, 1.0), HYPOTHESIS_GRID, Target::Velocity) {
        Ok(r) => Ok(r.osc),
        Err(ArgumentError::Stagnation { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e.into()),
    }
}
