//! Kummer's confluent hypergeometric function M(a, b, y) for complex
//! parameters and nonnegative real argument.
//!
//! The defining power series Σ (a)_n/(b)_n yⁿ/n! is used on the whole
//! contract domain. For this argument family (y ≥ 0, parameters with
//! moderate real part) the series terms carry slowly rotating phases and
//! a same-scale maximum, so direct summation is well conditioned up to
//! the representability limit; the exponentially scaled variant starts
//! the recurrence at e^(-y) instead of 1 and never leaves the finite
//! range. An asymptotic large-y form exists but is used only by the test
//! suite as a cross-check, never as a production path.

use num_complex::Complex64;

use super::near_nonpositive_integer;
use crate::error::{Error, Result};

/// Largest argument accepted by default: e^(-y) must stay a normal f64
/// so the scaled series seed is representable.
pub const DEFAULT_Y_MAX: f64 = 700.0;

const MAX_TERMS: usize = 100_000;
const TERM_EPS: f64 = 1e-16;
/// Consecutive negligible terms required before the sum is declared converged.
const QUIET_TERMS: usize = 10;

/// M(a, b, y) by direct series summation.
///
/// `b` must stay away from nonpositive integers (within 1e-14) and
/// `y` must lie in [0, 700]; larger arguments overflow the unscaled
/// value and callers should use [`kummer_m_scaled`].
pub fn kummer_m(a: Complex64, b: Complex64, y: f64) -> Result<Complex64> {
    series(a, b, y, 1.0)
}

/// e^(-y) · M(a, b, y), finite on the whole [0, 700] domain.
pub fn kummer_m_scaled(a: Complex64, b: Complex64, y: f64) -> Result<Complex64> {
    if y > DEFAULT_Y_MAX {
        return Err(Error::Overflow(format!(
            "kummer argument y = {y} exceeds the supported maximum {DEFAULT_Y_MAX}"
        )));
    }
    series(a, b, y, (-y).exp())
}

fn series(a: Complex64, b: Complex64, y: f64, seed: f64) -> Result<Complex64> {
    if near_nonpositive_integer(b, 1e-14) {
        return Err(Error::Domain(format!(
            "kummer parameter b = {b} is a nonpositive integer"
        )));
    }
    if y < 0.0 {
        return Err(Error::Domain(format!("kummer argument y = {y} is negative")));
    }
    if y > DEFAULT_Y_MAX {
        return Err(Error::Overflow(format!(
            "kummer argument y = {y} exceeds the supported maximum {DEFAULT_Y_MAX}; \
             use the scaled variant"
        )));
    }
    let mut term = Complex64::new(seed, 0.0);
    let mut sum = term;
    if y == 0.0 {
        return Ok(sum);
    }
    let mut quiet = 0usize;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) / (b + nf) * (y / (nf + 1.0));
        sum += term;
        if !sum.is_finite() {
            return Err(Error::Overflow(format!(
                "kummer series overflowed at term {n} (a = {a}, b = {b}, y = {y})"
            )));
        }
        if term.norm_sqr() <= (TERM_EPS * TERM_EPS) * sum.norm_sqr() {
            quiet += 1;
            if quiet >= QUIET_TERMS {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Convergence(format!(
        "kummer series did not converge within {MAX_TERMS} terms (a = {a}, b = {b}, y = {y})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn value_at_zero_is_one() {
        let m = kummer_m(c(0.3, -1.2), c(1.0, 0.6), 0.0).unwrap();
        assert_eq!(m, c(1.0, 0.0));
    }

    #[test]
    fn equal_parameters_give_exponential() {
        // M(b, b, y) = e^y.
        for &y in &[0.5, 3.0, 25.0, 120.0] {
            let b = c(1.0, 0.8);
            let m = kummer_m(b, b, y).unwrap();
            let rel = (m - c(y.exp(), 0.0)).norm() / y.exp();
            assert!(rel < 1e-13, "y = {y}: rel = {rel:e}");
        }
    }

    #[test]
    fn scaled_variant_matches_direct() {
        let a = c(-0.914, 0.35);
        let b = c(1.0, 0.7);
        for &y in &[1.0, 30.0, 250.0] {
            let direct = kummer_m(a, b, y).unwrap();
            let scaled = kummer_m_scaled(a, b, y).unwrap();
            let rel = (scaled * y.exp() - direct).norm() / direct.norm();
            assert!(rel < 1e-12, "y = {y}: rel = {rel:e}");
        }
    }

    #[test]
    fn scaled_variant_is_finite_at_large_y() {
        let a = c(-0.914, 2.0);
        let b = c(1.0, 4.0);
        let m = kummer_m_scaled(a, b, 690.0).unwrap();
        assert!(m.is_finite());
        assert!(m.norm() > 0.0);
    }

    #[test]
    fn rejects_nonpositive_integer_b() {
        assert!(matches!(
            kummer_m(c(0.5, 0.0), c(0.0, 0.0), 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            kummer_m(c(0.5, 0.0), c(-3.0, 0.0), 1.0),
            Err(Error::Domain(_))
        ));
        // b = 1 is the boundary case that legitimately arises (k = 0).
        assert!(kummer_m(c(0.5, 0.0), c(1.0, 0.0), 1.0).is_ok());
    }

    #[test]
    fn rejects_negative_and_oversized_arguments() {
        assert!(matches!(
            kummer_m(c(0.5, 0.0), c(1.5, 0.0), -1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            kummer_m(c(0.5, 0.0), c(1.5, 0.0), 701.0),
            Err(Error::Overflow(_))
        ));
    }
}
