//! Real digamma function on the positive axis.

use super::EULER_GAMMA;
use crate::error::{Error, Result};

/// B_{2k} / (2k) for the asymptotic tail, k = 1..7.
const ASYMP: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// ψ(x) = d/dx ln Γ(x) for x > 0.
///
/// Recurrence-shifts the argument above 10 and evaluates the asymptotic
/// expansion ln x − 1/(2x) − Σ B₂ₖ/(2k x^{2k}).
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("digamma argument x = {x} must be positive")));
    }
    let mut shift = 0.0;
    let mut w = x;
    while w < 10.0 {
        shift -= 1.0 / w;
        w += 1.0;
    }
    let inv2 = 1.0 / (w * w);
    let mut series = 0.0;
    let mut p = inv2;
    for coeff in ASYMP {
        series += coeff * p;
        p *= inv2;
    }
    Ok(shift + w.ln() - 0.5 / w - series)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_one_is_minus_euler_gamma() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-14);
    }

    #[test]
    fn value_at_two() {
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-14);
    }

    #[test]
    fn recurrence_residual() {
        let mut x = 0.1;
        while x < 100.0 {
            let r = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
            assert!(r.abs() < 1e-12, "x = {x}: residual {r:e}");
            x *= 1.37;
        }
    }

    #[test]
    fn rejects_nonpositive_arguments() {
        assert!(matches!(digamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(digamma(-2.5), Err(Error::Domain(_))));
    }
}
