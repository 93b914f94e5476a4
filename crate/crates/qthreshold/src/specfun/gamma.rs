//! Principal-branch log-gamma for complex arguments.
//!
//! Strategy: conjugate into the upper half-plane, recurrence-shift the
//! real part above 10 and apply the Stirling series there; for Re z < 0.5
//! use the reflection formula with the winding correction that keeps the
//! imaginary part on the principal branch (Hare's prescription).

use num_complex::Complex64;

use super::near_nonpositive_integer;
use crate::error::{Error, Result};

const LOG_PI: f64 = 1.144729885849400174143427351353;
const LOG_TWO_PI_HALF: f64 = 0.918938533204672741780329736406; // ln(2π)/2
const TWO_PI: f64 = 6.283185307179586476925286766559;

/// B_{2k} / (2k (2k-1)) for the Stirling series, k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// Re(z) above which the Stirling series is applied directly.
const SHIFT_TARGET: f64 = 10.0;

/// Principal-branch log Γ(z).
///
/// Errors with [`Error::Pole`] when `z` is a nonpositive integer within
/// 1e-14.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if near_nonpositive_integer(z, 1e-14) {
        return Err(Error::Pole(format!("log_gamma pole at z = {z}")));
    }
    Ok(log_gamma_inner(z))
}

fn log_gamma_inner(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return log_gamma_inner(z.conj()).conj();
    }
    if z.re >= 0.5 {
        return shifted_stirling(z);
    }
    // Reflection with winding correction: keeps Im on the principal branch
    // for Im(z) >= 0.
    let winding = TWO_PI * (0.5 * z.re + 0.25).floor();
    Complex64::new(LOG_PI, winding) - log_sin_pi(z) - log_gamma_inner(Complex64::new(1.0, 0.0) - z)
}

fn shifted_stirling(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < SHIFT_TARGET {
        shift += w.ln();
        w += 1.0;
    }
    let mut series = Complex64::new(0.0, 0.0);
    let w2 = w * w;
    let mut p = w;
    for coeff in STIRLING {
        series += coeff / p;
        p *= w2;
    }
    (w - 0.5) * w.ln() - w + LOG_TWO_PI_HALF + series - shift
}

/// log sin(πz) for Im(z) >= 0, continuous off the real axis.
fn log_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 1.0 {
        // Direct evaluation; |Im| is small enough that sinh/cosh stay tame.
        let (sx, cx) = (std::f64::consts::PI * z.re).sin_cos();
        let sh = (std::f64::consts::PI * z.im).sinh();
        let ch = (std::f64::consts::PI * z.im).cosh();
        Complex64::new(sx * ch, cx * sh).ln()
    } else {
        // sin(πz) = -e^{-iπz}(1 - e^{2πiz}) / (2i); the exponent form avoids
        // overflow and keeps the imaginary part unwound for Im(z) >= 1.
        let i = Complex64::new(0.0, 1.0);
        let e = (2.0 * std::f64::consts::PI * i * z).exp();
        let log_half = Complex64::new(std::f64::consts::LN_2, 0.5 * std::f64::consts::PI);
        -i * std::f64::consts::PI * z + (Complex64::new(1.0, 0.0) - e).ln() - log_half
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn known_real_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        assert!(log_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-14);
        let half = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        assert!(half.im.abs() < 1e-14);
        // Γ(5) = 24.
        let five = log_gamma(c(5.0, 0.0)).unwrap();
        assert!((five.re - 24f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn conjugation_symmetry_is_exact() {
        let z = c(-0.914, 3.7);
        let a = log_gamma(z).unwrap();
        let b = log_gamma(z.conj()).unwrap();
        assert_eq!(a.re, b.re);
        assert_eq!(a.im, -b.im);
    }

    #[test]
    fn recurrence_across_the_shift_boundary() {
        // Γ(z+1) = z Γ(z), i.e. logΓ(z+1) - logΓ(z) - ln z = 0 (mod 2πi).
        for &z in &[c(0.3, 0.2), c(-0.9, 1.0), c(3.2, 18.0), c(-0.4, 0.01)] {
            let lhs = log_gamma(z + 1.0).unwrap();
            let rhs = log_gamma(z).unwrap() + z.ln();
            let diff = (lhs - rhs) / TWO_PI;
            // allow an integer multiple of 2πi
            let frac = diff.im - diff.im.round();
            assert!(diff.re.abs() < 1e-12, "z = {z}");
            assert!(frac.abs() < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn closed_form_modulus_on_the_imaginary_direction() {
        // |Γ(1+iy)|² = πy / sinh(πy)
        for &y in &[0.5, 2.0, 10.0, 20.0] {
            let lg = log_gamma(c(1.0, y)).unwrap();
            let target = (std::f64::consts::PI * y / (std::f64::consts::PI * y).sinh()).ln();
            assert!((2.0 * lg.re - target).abs() < 1e-12 * target.abs().max(1.0), "y = {y}");
        }
        // |Γ(1/2+iy)|² = π / cosh(πy)
        for &y in &[0.3, 1.0, 5.0] {
            let lg = log_gamma(c(0.5, y)).unwrap();
            let target = (std::f64::consts::PI / (std::f64::consts::PI * y).cosh()).ln();
            assert!((2.0 * lg.re - target).abs() < 1e-12, "y = {y}");
        }
    }

    #[test]
    fn pole_detection() {
        assert!(matches!(log_gamma(c(0.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(log_gamma(c(-7.0, 0.0)), Err(Error::Pole(_))));
        assert!(log_gamma(c(-7.0, 1e-6)).is_ok());
    }
}
