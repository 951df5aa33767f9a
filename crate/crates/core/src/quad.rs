//! Adaptive Gauss–Kronrod (7, 15) quadrature on an interval.

use thiserror::Error;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature did not converge: achieved error estimate {achieved:e} (target {target:e})")]
    NoConvergence { achieved: f64, target: f64 },
    #[error("integrand failed: {0}")]
    Integrand(String),
}

/// Integral estimate with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

fn gk15<F, E>(f: &mut F, a: f64, b: f64) -> Result<Quadrature, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let f1 = f(c - h * x)?;
        let f2 = f(c + h * x)?;
        kron += w * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Quadrature { value: kron * h, error: ((kron - gauss) * h).abs() })
}

/// Integrates `f` over `[a, b]` to the absolute tolerance `abs_tol` by
/// repeated bisection of the interval with the worst error estimate.
pub fn integrate<F, E>(mut f: F, a: f64, b: f64, abs_tol: f64) -> Result<Quadrature, QuadError>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: std::fmt::Display,
{
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0 });
    }
    if b < a {
        let q = integrate(f, b, a, abs_tol)?;
        return Ok(Quadrature { value: -q.value, error: q.error });
    }
    let mut eval = |lo, hi| gk15(&mut f, lo, hi).map_err(|e| QuadError::Integrand(e.to_string()));
    let first = eval(a, b)?;
    let mut pieces = vec![(a, b, first)];
    let mut total_err = first.error;
    let max_pieces = 4000;
    while total_err > abs_tol {
        if pieces.len() >= max_pieces {
            return Err(QuadError::NoConvergence { achieved: total_err, target: abs_tol });
        }
        let (k, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .expect("non-empty");
        let (lo, hi, _) = pieces.swap_remove(k);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(QuadError::NoConvergence { achieved: total_err, target: abs_tol });
        }
        pieces.push((lo, mid, eval(lo, mid)?));
        pieces.push((mid, hi, eval(mid, hi)?));
        total_err = pieces.iter().map(|p| p.2.error).sum();
    }
    let value = pieces.iter().map(|p| p.2.value).sum();
    Ok(Quadrature { value, error: total_err })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(x: f64) -> Result<f64, std::convert::Infallible> {
        Ok(x)
    }

    #[test]
    fn polynomials_are_exact() {
        let q = integrate(|x| ok(x * x * x - 2.0 * x), 0.0, 2.0, 1e-12).unwrap();
        assert!((q.value - 0.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_integrand() {
        let q = integrate(|x| ok((10.0 * x).sin()), 0.0, 3.0, 1e-12).unwrap();
        let exact = (1.0 - (30.0f64).cos()) / 10.0;
        assert!((q.value - exact).abs() < 1e-12);
    }

    #[test]
    fn reversed_interval_changes_sign() {
        let q = integrate(|x| ok(x.exp()), 1.0, 0.0, 1e-12).unwrap();
        assert!((q.value + (1f64.exp() - 1.0)).abs() < 1e-13);
    }
}
