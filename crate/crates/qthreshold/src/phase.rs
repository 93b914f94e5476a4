//! Compensated phase arithmetic.
//!
//! Propagation phases ω·t reach hundreds of radians (hundreds of cycles in
//! the slowest runs), so the product is formed in double-double precision
//! and reduced modulo 2π before any trigonometric call. The reduction keeps
//! the angle error near one ulp of 2π instead of one ulp of the raw phase.

use num_complex::Complex64;

/// 2π split into a high and a low part (hi + lo is 2π to ~1e-32).
const TWO_PI_HI: f64 = 6.283185307179586;
const TWO_PI_LO: f64 = 2.4492935982947064e-16;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

/// `omega * t` reduced into (-2π, 2π), computed with a compensated product.
pub fn phase_mod_2pi(omega: f64, t: f64) -> f64 {
    let (p, e) = two_prod(omega, t);
    // Nearest multiple of 2π, subtracted in two parts to avoid cancellation.
    let n = (p / TWO_PI_HI).round();
    let (mut hi, mut lo) = two_sum(p, -n * TWO_PI_HI);
    lo += e - n * TWO_PI_LO;
    // One correction pass in case the first subtraction left > 2π.
    let n2 = (hi / TWO_PI_HI).round();
    if n2 != 0.0 {
        let (h2, l2) = two_sum(hi, -n2 * TWO_PI_HI);
        hi = h2;
        lo += l2 - n2 * TWO_PI_LO;
    }
    hi + lo
}

/// `exp(-i * omega * t)` with the compensated reduction above.
#[inline]
pub fn cis_neg(omega: f64, t: f64) -> Complex64 {
    let ph = phase_mod_2pi(omega, t);
    Complex64::new(ph.cos(), -ph.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_product_for_small_phases() {
        let ph = phase_mod_2pi(1.25, 2.0);
        assert!((ph - 2.5).abs() < 1e-15);
    }

    #[test]
    fn reduction_is_consistent_with_shifted_time() {
        // omega*t and omega*(t + 2πk/omega) must give the same angle.
        let omega = 1.4449999999e-4;
        let t = 6.6e10;
        let a = phase_mod_2pi(omega, t);
        // Compare sin/cos instead of the raw angle (the reduced representative
        // may differ by 2π).
        let direct = omega * t % (2.0 * std::f64::consts::PI);
        assert!((a.sin() - direct.sin()).abs() < 1e-9);
        assert!((a.cos() - direct.cos()).abs() < 1e-9);
    }

    #[test]
    fn stays_bounded() {
        for i in 1..2000 {
            let ph = phase_mod_2pi(954.3, i as f64);
            assert!(ph.abs() <= 2.0 * std::f64::consts::PI);
        }
    }
}
