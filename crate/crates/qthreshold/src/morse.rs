//! Exact scattering on a Morse potential.
//!
//! Potential, coordinate transforms, classical turning points, the
//! badlands (quantality) diagnostic, the exact reflection amplitude,
//! its threshold expansion, and stationary scattering wavefunctions.
//! The well is at z0 with the repulsive wall to its left; particles come
//! in from large positive z.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{digamma, kummer_m, kummer_m_scaled, log_gamma, EULER_GAMMA};

/// Morse potential parameters V·[e^(-2(z-z0)/d) - 2 e^(-(z-z0)/d)].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseParams {
    /// Well depth V > 0.
    pub v: f64,
    /// Inverse stiffness d > 0.
    pub d: f64,
    /// Position of the well minimum.
    pub z0: f64,
    /// Particle mass.
    pub m: f64,
    /// Reduced Planck constant.
    pub hbar: f64,
}

/// Phase convention carried by a reflection amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseConvention {
    /// Asymptotic form e^(-ikz) + R e^(ikz); the well-position factor
    /// e^(-2ikz0) is folded into R.
    WellReferenced,
}

/// Reflection amplitude at a single wavenumber.
#[derive(Debug, Clone, Copy)]
pub struct ReflectionValue {
    pub k: f64,
    pub amplitude: Complex64,
    pub convention: PhaseConvention,
    /// True when the value is the analytic k → 0 limit rather than a
    /// direct evaluation.
    pub threshold_limit: bool,
}

impl MorseParams {
    pub fn new(v: f64, d: f64, z0: f64, m: f64, hbar: f64) -> Result<Self> {
        if !(v > 0.0 && d > 0.0 && m > 0.0 && hbar > 0.0) {
            return Err(Error::Domain(format!(
                "morse parameters must be positive (v = {v}, d = {d}, m = {m}, hbar = {hbar})"
            )));
        }
        if !z0.is_finite() {
            return Err(Error::Domain(format!("well position z0 = {z0} must be finite")));
        }
        Ok(MorseParams { v, d, z0, m, hbar })
    }

    /// Reference parameter set used throughout: V = d = 1, z0 = 0, m = ħ = 1.
    pub fn reference() -> Self {
        MorseParams {
            v: 1.0,
            d: 1.0,
            z0: 0.0,
            m: 1.0,
            hbar: 1.0,
        }
    }

    /// Harmonic frequency about the well bottom, ω₀ = sqrt(2V/(m d²)).
    pub fn omega0(&self) -> f64 {
        (2.0 * self.v / (self.m * self.d * self.d)).sqrt()
    }

    /// Scale Y = sqrt(8 m d² V)/ħ of the dimensionless coordinate.
    pub fn y_scale(&self) -> f64 {
        (8.0 * self.m * self.d * self.d * self.v).sqrt() / self.hbar
    }

    /// V(z).
    pub fn potential(&self, z: f64) -> f64 {
        let x = (-(z - self.z0) / self.d).exp();
        self.v * (x * x - 2.0 * x)
    }

    /// dV/dz in closed form.
    pub fn potential_deriv(&self, z: f64) -> f64 {
        let x = (-(z - self.z0) / self.d).exp();
        -2.0 * self.v / self.d * (x * x - x)
    }

    /// d²V/dz² in closed form.
    pub fn potential_second_deriv(&self, z: f64) -> f64 {
        let x = (-(z - self.z0) / self.d).exp();
        2.0 * self.v / (self.d * self.d) * (2.0 * x * x - x)
    }

    /// Dimensionless coordinate y(z) = Y e^(-(z-z0)/d).
    pub fn y_of_z(&self, z: f64) -> Result<f64> {
        let expo = -(z - self.z0) / self.d;
        if expo > 700.0 {
            return Err(Error::Overflow(format!(
                "y(z) overflows at z = {z} (exponent {expo:.1})"
            )));
        }
        Ok(self.y_scale() * expo.exp())
    }

    /// Classical turning point on the repulsive wall for energy E > 0:
    /// z_TP = z0 - d ln(1 + sqrt(1 + E/V)).
    pub fn turning_point(&self, e: f64) -> Result<f64> {
        if !(e > 0.0) {
            return Err(Error::Domain(format!("turning point requires E > 0, got {e}")));
        }
        Ok(self.z0 - self.d * (1.0 + (1.0 + e / self.v).sqrt()).ln())
    }

    /// Classical momentum p(z) = sqrt(2m(E - V(z))), positive branch.
    pub fn classical_momentum(&self, z: f64, e: f64) -> Result<f64> {
        let v = self.potential(z);
        if e <= v {
            return Err(Error::Domain(format!(
                "classically forbidden: E = {e} <= V({z}) = {v}"
            )));
        }
        Ok((2.0 * self.m * (e - v)).sqrt())
    }

    /// Badlands (quantality) function
    /// Q(z) = ħ²[(3/4)(p')²/p⁴ - p''/(2p³)], evaluated with the exact
    /// closed-form derivatives of the Morse potential.
    pub fn badlands(&self, z: f64, e: f64) -> Result<f64> {
        let p = self.classical_momentum(z, e)?;
        let w1 = self.potential_deriv(z);
        let w2 = self.potential_second_deriv(z);
        let m = self.m;
        let dp = -m * w1 / p;
        let ddp = -m * w2 / p - m * m * w1 * w1 / (p * p * p);
        let h2 = self.hbar * self.hbar;
        Ok(h2 * (0.75 * dp * dp / p.powi(4) - ddp / (2.0 * p.powi(3))))
    }

    /// Location and value of the global maximum of |Q| on (z_TP, ∞).
    ///
    /// |Q| is scanned on a 1000-point grid, log-spaced in z − z_TP from
    /// 1e-3 to z0 + 50 d, then refined by golden-section search. The scan
    /// comes first because |Q| has several lobes and the global maximum
    /// must be isolated before local refinement.
    pub fn badlands_peak(&self, e: f64) -> Result<(f64, f64)> {
        let z_tp = self.turning_point(e)?;
        let lo = 1e-3 * self.d;
        let hi = self.z0 + 50.0 * self.d - z_tp;
        if hi <= lo {
            return Err(Error::Convergence(
                "badlands scan interval is empty".to_string(),
            ));
        }
        let n = 1000;
        let ratio = (hi / lo).ln() / (n - 1) as f64;
        let absq = |dz: f64| -> f64 {
            self.badlands(z_tp + dz, e).map(f64::abs).unwrap_or(0.0)
        };
        let mut best = (0usize, 0.0f64);
        for i in 0..n {
            let dz = lo * ((i as f64) * ratio).exp();
            let q = absq(dz);
            if q > best.1 {
                best = (i, q);
            }
        }
        if best.0 == 0 || best.0 == n - 1 {
            return Err(Error::Convergence(format!(
                "badlands maximum not bracketed by the scan (index {})",
                best.0
            )));
        }
        let mut a = lo * (((best.0 - 1) as f64) * ratio).exp();
        let mut b = lo * (((best.0 + 1) as f64) * ratio).exp();
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let mut f1 = absq(x1);
        let mut f2 = absq(x2);
        for _ in 0..120 {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = absq(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = absq(x1);
            }
            if b - a < 1e-12 * (1.0 + b.abs()) {
                break;
            }
        }
        let dz = 0.5 * (a + b);
        Ok((z_tp + dz, absq(dz)))
    }

    /// Exact reflection amplitude.
    ///
    /// Evaluated as exp of log-gamma differences so that the gamma ratios
    /// never overflow or cancel catastrophically; |R| = 1 holds to
    /// rounding. k = 0 returns the analytic limit R = -1, tagged as such.
    /// Negative k is accepted (the analytic continuation), which gives
    /// R(-k) = conj R(k).
    pub fn reflection_amplitude(&self, k: f64) -> Result<ReflectionValue> {
        if k == 0.0 {
            return Ok(ReflectionValue {
                k,
                amplitude: Complex64::new(-1.0, 0.0),
                convention: PhaseConvention::WellReferenced,
                threshold_limit: true,
            });
        }
        Ok(ReflectionValue {
            k,
            amplitude: self.reflection_coeff(k)?,
            convention: PhaseConvention::WellReferenced,
            threshold_limit: false,
        })
    }

    /// Reflection amplitude as a bare complex number (k ≠ 0).
    pub(crate) fn reflection_coeff(&self, k: f64) -> Result<Complex64> {
        let kd = k * self.d;
        let y = self.y_scale();
        // Arguments 1 ± 2μ and (1 ± 2μ - Y)/2 with μ = ikd.
        let one_plus = Complex64::new(1.0, 2.0 * kd);
        let one_minus = Complex64::new(1.0, -2.0 * kd);
        let half_minus = Complex64::new((1.0 - y) / 2.0, -kd);
        let half_plus = Complex64::new((1.0 - y) / 2.0, kd);
        let s = log_gamma(one_plus)? - log_gamma(one_minus)? + log_gamma(half_minus)?
            - log_gamma(half_plus)?;
        let phase = -2.0 * k * (self.z0 + self.d * y.ln());
        let rot = Complex64::new(phase.cos(), phase.sin());
        Ok(-s.exp() * rot)
    }

    /// Threshold slope d(Im R)/dk at k = 0 by central finite difference
    /// at k = ±1e-6. This is the reference value; see
    /// [`MorseParams::threshold_slope_expansion`] for the closed form.
    pub fn threshold_slope(&self) -> Result<f64> {
        let h = 1e-6;
        let plus = self.reflection_coeff(h)?;
        let minus = self.reflection_coeff(-h)?;
        Ok((plus.im - minus.im) / (2.0 * h))
    }

    /// Closed-form threshold expansion of the slope,
    /// 2d·[ln Y + d·ψ((1+Y)/2) - π tan(πY/2) + 4γ].
    ///
    /// Kept verbatim as a cross-check only: for the reference parameters
    /// it disagrees with the finite-difference slope by roughly 13%, so
    /// [`MorseParams::threshold_slope`] is authoritative.
    pub fn threshold_slope_expansion(&self) -> Result<f64> {
        let y = self.y_scale();
        let psi = digamma((1.0 + y) / 2.0)?;
        let bracket = y.ln() + self.d * psi - std::f64::consts::PI * (std::f64::consts::PI * y / 2.0).tan()
            + 4.0 * EULER_GAMMA;
        Ok(2.0 * self.d * bracket)
    }

    /// Largest k such that Im R stays within `tol` (relative) of the
    /// linear threshold law slope·k on the whole interval (0, k_max].
    pub fn threshold_linearity_window(&self, tol: f64) -> Result<f64> {
        if !(tol > 0.0 && tol < 0.5) {
            return Err(Error::Domain(format!(
                "linearity tolerance must lie in (0, 0.5), got {tol}"
            )));
        }
        let slope = self.threshold_slope()?;
        let deviates = |k: f64| -> Result<bool> {
            let im = self.reflection_coeff(k)?.im;
            Ok((im - slope * k).abs() > tol * (slope * k).abs())
        };
        let k_lo = 1e-6;
        let k_hi = 10.0;
        let n = 600;
        let step = (k_hi / k_lo).ln() / (n - 1) as f64;
        let mut last_good = k_lo;
        let mut first_bad = None;
        for i in 0..n {
            let k = k_lo * ((i as f64) * step).exp();
            if deviates(k)? {
                first_bad = Some(k);
                break;
            }
            last_good = k;
        }
        let Some(mut bad) = first_bad else {
            return Ok(k_hi);
        };
        let mut good = last_good;
        for _ in 0..60 {
            let mid = (good * bad).sqrt();
            if deviates(mid)? {
                bad = mid;
            } else {
                good = mid;
            }
        }
        Ok(good)
    }

    /// Stationary scattering wavefunction Ψ⁺_k(z) for k > 0, normalized
    /// to the asymptotic form (e^(-ikz) + R e^(ikz))/sqrt(2π).
    pub fn scattering_wavefunction(&self, k: f64, z: f64) -> Result<Complex64> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!(
                "scattering wavefunction requires k > 0, got {k}"
            )));
        }
        let y = self.y_of_z(z)?;
        let yy = self.y_scale();
        let kd = k * self.d;
        let a_plus = Complex64::new((1.0 - yy) / 2.0, kd);
        let b_plus = Complex64::new(1.0, 2.0 * kd);
        let a_minus = Complex64::new((1.0 - yy) / 2.0, -kd);
        let b_minus = Complex64::new(1.0, -2.0 * kd);
        let f_plus = exp_half_weighted(a_plus, b_plus, y)?;
        let f_minus = exp_half_weighted(a_minus, b_minus, y)?;
        let r = self.reflection_coeff(k)?;
        let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let inc = Complex64::new(0.0, -k * z).exp();
        let out = Complex64::new(0.0, k * z).exp();
        Ok(norm * (inc * f_plus + r * out * f_minus))
    }
}

/// e^(-y/2) · M(a, b, y), routed through the scaled series when the bare
/// Kummer value would be large.
pub(crate) fn exp_half_weighted(a: Complex64, b: Complex64, y: f64) -> Result<Complex64> {
    if y <= 30.0 {
        Ok(kummer_m(a, b, y)? * (-0.5 * y).exp())
    } else {
        Ok(kummer_m_scaled(a, b, y)? * (0.5 * y).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> MorseParams {
        MorseParams::reference()
    }

    #[test]
    fn derived_scales_match_reference_values() {
        let p = p();
        assert!((p.omega0() - 2f64.sqrt()).abs() < 1e-15);
        assert!((p.y_scale() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn potential_well_minimum_and_tail() {
        let p = p();
        assert!((p.potential(p.z0) + p.v).abs() < 1e-15);
        assert!(p.potential(40.0).abs() < 1e-15);
        assert!(p.potential(40.0) < 0.0);
        // closed-form turning point inversion at E = 0.5
        let z = -(1.0 + 1.5f64.sqrt()).ln();
        assert!((p.potential(z) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn potential_derivatives_match_finite_differences() {
        let p = p();
        let h = 1e-6;
        for &z in &[-0.9, 0.0, 1.3, 4.0] {
            let d1 = (p.potential(z + h) - p.potential(z - h)) / (2.0 * h);
            let d2 = (p.potential(z + h) - 2.0 * p.potential(z) + p.potential(z - h)) / (h * h);
            assert!((d1 - p.potential_deriv(z)).abs() < 1e-7 * (1.0 + d1.abs()));
            assert!((d2 - p.potential_second_deriv(z)).abs() < 1e-4 * (1.0 + d2.abs()));
        }
    }

    #[test]
    fn dimensionless_coordinate() {
        let p = p();
        let y0 = p.y_of_z(p.z0).unwrap();
        assert!((y0 - p.y_scale()).abs() < 1e-14);
        let doubled = p.y_of_z(p.z0 - p.d * 2f64.ln()).unwrap();
        assert!((doubled - 2.0 * p.y_scale()).abs() < 1e-13);
        assert!(p.y_of_z(100.0).unwrap() < 1e-40);
        assert!(matches!(p.y_of_z(-800.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn turning_point_limits_and_residual() {
        let p = p();
        // E -> 0 limit is z0 - d ln 2.
        let z = p.turning_point(1e-14).unwrap();
        assert!((z - (p.z0 - p.d * 2f64.ln())).abs() < 1e-12);
        for &e in &[5e-1, 5e-3, 5e-5, 5e-7, 5e-9] {
            let z_tp = p.turning_point(e).unwrap();
            assert!((p.potential(z_tp) - e).abs() < 1e-12 * e);
        }
    }

    #[test]
    fn classical_momentum_values() {
        let p = p();
        assert!((p.classical_momentum(0.0, 0.5).unwrap() - 3f64.sqrt()).abs() < 1e-14);
        assert!((p.classical_momentum(60.0, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            p.classical_momentum(-2.0, 0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn badlands_vanishes_far_out() {
        let p = p();
        let q_far = p.badlands(50.0, 5e-5).unwrap();
        let q_near = p.badlands(11.5, 5e-5).unwrap();
        assert!(q_far.abs() < 1e-6 * q_near.abs());
    }

    #[test]
    fn unitarity_on_a_log_grid() {
        let p = p();
        let mut k = 1e-6;
        while k <= 10.0 {
            let r = p.reflection_amplitude(k).unwrap();
            assert!(
                (r.amplitude.norm() - 1.0).abs() < 1e-12,
                "k = {k}: |R| deviates by {:e}",
                (r.amplitude.norm() - 1.0).abs()
            );
            k *= 2.7;
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let p = p();
        for &k in &[1e-5, 1e-2, 0.8, 7.0] {
            let plus = p.reflection_coeff(k).unwrap();
            let minus = p.reflection_coeff(-k).unwrap();
            assert!((minus - plus.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn threshold_limit_is_minus_one() {
        let p = p();
        let r0 = p.reflection_amplitude(0.0).unwrap();
        assert!(r0.threshold_limit);
        assert_eq!(r0.amplitude, Complex64::new(-1.0, 0.0));
        // small-k continuity toward the limit
        let r = p.reflection_coeff(1e-8).unwrap();
        assert!((r.re + 1.0).abs() < 1e-8);
        assert!(r.im.abs() < 1e-3);
    }
}
