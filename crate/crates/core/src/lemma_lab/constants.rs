//! The explicit constants `C1(η)`, `C2(η)`, `C_η` and the partition
//! integers used by the logarithmic estimates.
//!
//! Each constant is a supremum over a half-line. It is computed by a
//! log-spaced scan of `[t0, T]`, a golden-section polish of the best
//! bracket, and a comparison with the analytic limit at infinity.
//!
//! ```
//! use flowlab::lemma_lab::constants::constants;
//!
//! let c = constants(1.0).unwrap();
//! assert!(c.c1 >= 288.0 * std::f64::consts::PI / 2f64.ln());
//! assert_eq!(c.omega, 0.5);
//! ```

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tracer::golden_min;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstantsError {
    #[error("eta must lie in (0, 1], got {0}")]
    Eta(f64),
    #[error("endpoint gap d must be at least 1, got {0}")]
    Gap(f64),
}

/// Upper end of the scanned interval; beyond it only the limit is used.
pub const SCAN_END: f64 = 1e12;
const SCAN_POINTS: usize = 4000;

/// Result of a supremum search over `[t0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Supremum {
    pub value: f64,
    /// Where the scanned maximum sits; `None` when the limit at infinity
    /// exceeds every scanned value.
    pub argmax: Option<f64>,
    /// Largest value found on `[t0, T]`.
    pub scanned_max: f64,
    /// `lim_{t→∞}`.
    pub limit: f64,
}

/// Supremum of `h` over `[t0, ∞)` given its limit at infinity.
pub fn sup_half_line(h: impl Fn(f64) -> f64, t0: f64, limit: f64) -> Supremum {
    let (l0, l1) = (t0.ln(), SCAN_END.ln());
    let at = |k: usize| (l0 + (l1 - l0) * k as f64 / (SCAN_POINTS - 1) as f64).exp();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for k in 0..SCAN_POINTS {
        let v = h(at(k));
        if v > best.0 {
            best = (v, k);
        }
    }
    let lo = at(best.1.saturating_sub(1)).ln();
    let hi = at((best.1 + 1).min(SCAN_POINTS - 1)).ln();
    let s = golden_min(|s| -h(s.exp()), lo, hi, 1e-12 * (1.0 + hi.abs()));
    let mut arg = at(best.1);
    let mut max = best.0;
    for cand in [s.exp(), lo.exp(), hi.exp()] {
        let v = h(cand);
        if v > max {
            max = v;
            arg = cand;
        }
    }
    if limit > max {
        Supremum { value: limit, argmax: None, scanned_max: max, limit }
    } else {
        Supremum { value: max, argmax: Some(arg), scanned_max: max, limit }
    }
}

fn check_eta(eta: f64) -> Result<(), ConstantsError> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(ConstantsError::Eta(eta))
    }
}

/// `ω = η²/2`.
pub fn omega(eta: f64) -> f64 {
    eta * eta / 2.0
}

/// `288π η⁻² (log₂(t η⁻⁴) + 2) / ln(3 + t)`.
pub fn h1(eta: f64, t: f64) -> f64 {
    288.0 * PI / (eta * eta) * ((t / eta.powi(4)).log2() + 2.0) / (3.0 + t).ln()
}

/// `384π (log_{1+ω}(4 t η⁻²) + 1) / ln(3 + t)`.
pub fn h2(eta: f64, t: f64) -> f64 {
    let base = (1.0 + omega(eta)).ln();
    384.0 * PI * ((4.0 * t / (eta * eta)).ln() / base + 1.0) / (3.0 + t).ln()
}

/// `288π(2η⁻⁴ + 1)`, the floor in the definition of `C2`.
pub fn c2_floor(eta: f64) -> f64 {
    288.0 * PI * (2.0 / eta.powi(4) + 1.0)
}

/// `(C2 ln(3 + ρ + η⁻²ρ) + C1 ln(3 + η⁻²ρ)) / ln ρ`.
pub fn growth_ratio(eta: f64, c1: f64, c2: f64, rho: f64) -> f64 {
    let k = 1.0 / (eta * eta);
    (c2 * (3.0 + rho + k * rho).ln() + c1 * (3.0 + k * rho).ln()) / rho.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub eta: f64,
    pub omega: f64,
    pub c1: f64,
    pub c1_sup: Supremum,
    pub c2: f64,
    pub c2_sup: Supremum,
    pub c2_floor: f64,
    pub c_eta: f64,
    pub c_eta_sup: Supremum,
}

/// `C1(η) = sup_{t≥1} h1`, `C2(η) = max(sup_{t≥1} h2, 288π(2η⁻⁴+1))` and
/// `C_η = 2 sup_{ρ≥2} (C2 ln(3+ρ+η⁻²ρ) + C1 ln(3+η⁻²ρ)) / ln ρ`.
pub fn constants(eta: f64) -> Result<ConstantsReport, ConstantsError> {
    check_eta(eta)?;
    let c1_sup = sup_half_line(|t| h1(eta, t), 1.0, 288.0 * PI / (eta * eta) / LN_2);
    let c2_sup = sup_half_line(|t| h2(eta, t), 1.0, 384.0 * PI / (1.0 + omega(eta)).ln());
    let floor = c2_floor(eta);
    let (c1, c2) = (c1_sup.value, c2_sup.value.max(floor));
    let c_eta_sup = sup_half_line(|r| growth_ratio(eta, c1, c2, r), 2.0, c1 + c2);
    Ok(ConstantsReport {
        eta,
        omega: omega(eta),
        c1,
        c1_sup,
        c2,
        c2_sup,
        c2_floor: floor,
        c_eta: 2.0 * c_eta_sup.value,
        c_eta_sup,
    })
}

/// Partition integers for an endpoint gap `d` and the tail checks that
/// make the last sub-segment short enough.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionParams {
    pub d: f64,
    pub eta: f64,
    /// `[log₂(d η⁻⁴)] + 2`.
    pub m_dyadic: i64,
    /// `[log_{1+ω}(4 d η⁻²)] + 2`.
    pub m_geometric: i64,
    /// `[2η⁻⁴ + 1]`.
    pub n: i64,
    /// `2^{1−m} d`.
    pub dyadic_tail: f64,
    pub dyadic_tail_ok: bool,
    /// `(1+ω)^{−(m−1)} d`.
    pub geometric_tail: f64,
    pub geometric_tail_ok: bool,
}

pub fn partition_params(d: f64, eta: f64) -> Result<PartitionParams, ConstantsError> {
    check_eta(eta)?;
    if !(d >= 1.0) || !d.is_finite() {
        return Err(ConstantsError::Gap(d));
    }
    let w = omega(eta);
    let m_dyadic = (d / eta.powi(4)).log2().floor() as i64 + 2;
    let m_geometric = ((4.0 * d / (eta * eta)).ln() / (1.0 + w).ln()).floor() as i64 + 2;
    let n = (2.0 / eta.powi(4) + 1.0).floor() as i64;
    let dyadic_tail = 2f64.powi((1 - m_dyadic) as i32) * d;
    let geometric_tail = (1.0 + w).powi(-(m_geometric - 1) as i32) * d;
    Ok(PartitionParams {
        d,
        eta,
        m_dyadic,
        m_geometric,
        n,
        dyadic_tail,
        dyadic_tail_ok: dyadic_tail < eta.powi(4),
        geometric_tail,
        geometric_tail_ok: geometric_tail < eta * eta / 4.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense log-spaced grid maximum, independent of the search above.
    fn grid_sup(h: impl Fn(f64) -> f64, t0: f64, limit: f64) -> f64 {
        let n = 1_000_000;
        let (l0, l1) = (t0.ln(), 1e12f64.ln());
        let mut best = limit;
        for k in 0..n {
            let t = (l0 + (l1 - l0) * k as f64 / (n - 1) as f64).exp();
            best = best.max(h(t));
        }
        best
    }

    #[test]
    fn lower_bounds_hold() {
        for eta in [1.0, 0.75, 0.5, 0.25] {
            let c = constants(eta).unwrap();
            let e2 = eta * eta;
            assert!(c.c1 >= 288.0 * PI / e2 / LN_2);
            assert!(c.c1 > 96.0 * PI / e2);
            assert!(c.c2 >= (384.0 * PI / (1.0 + e2 / 2.0).ln()).max(c2_floor(eta)));
            assert!(384.0 * PI / (1.5f64).ln() > 192.0 * PI);
            assert!(c.omega > 0.0 && c.omega <= 0.5);
            assert!(c.c_eta >= 2.0 * (c.c1 + c.c2));
        }
        assert!(constants(1.0).unwrap().c1 >= 1305.33);
    }

    #[test]
    fn search_matches_dense_grid() {
        for eta in [1.0, 0.75, 0.5, 0.25] {
            let c = constants(eta).unwrap();
            let g1 = grid_sup(|t| h1(eta, t), 1.0, c.c1_sup.limit);
            let g2 = grid_sup(|t| h2(eta, t), 1.0, c.c2_sup.limit);
            assert!(((c.c1 - g1) / g1).abs() < 1e-6, "eta {eta}: {} vs {g1}", c.c1);
            assert!(((c.c2_sup.value - g2) / g2).abs() < 1e-6);
            let ge = grid_sup(|r| growth_ratio(eta, c.c1, c.c2, r), 2.0, c.c1 + c.c2);
            assert!(((c.c_eta_sup.value - ge) / ge).abs() < 1e-6);
        }
    }

    #[test]
    fn partition_examples() {
        let p = partition_params(1.0, 1.0).unwrap();
        assert_eq!((p.m_dyadic, p.n), (2, 3));
        assert_eq!(p.dyadic_tail, 0.5);
        assert!(p.dyadic_tail_ok && p.geometric_tail_ok);
        let q = partition_params(10.0, 0.5).unwrap();
        assert_eq!(q.m_dyadic, 9);
        assert!((q.dyadic_tail - 10.0 / 256.0).abs() < 1e-15);
        assert!(q.dyadic_tail_ok);
        assert!(partition_params(0.5, 1.0).is_err());
        assert!(constants(0.0).is_err());
        assert!(constants(1.5).is_err());
    }

    #[test]
    fn tails_hold_over_a_range_of_gaps() {
        for eta in [1.0, 0.75, 0.5, 0.25] {
            for k in 0..200 {
                let d = 1.0 + 0.37 * k as f64 * k as f64;
                let p = partition_params(d, eta).unwrap();
                assert!(p.dyadic_tail_ok && p.geometric_tail_ok, "d {d} eta {eta}");
            }
        }
    }
}
