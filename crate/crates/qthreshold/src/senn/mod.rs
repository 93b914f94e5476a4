//! General-potential quantum threshold reflection.
//!
//! Numerical realization of the boundary-data construction for arbitrary
//! 1D potentials of finite support: two fundamental solutions u and v are
//! integrated across the interaction region, the four boundary numbers
//! (p, q, s, w) are read off at the far edge, and the reflection and
//! transmission amplitudes follow algebraically. A wall variant selects
//! the decaying interior solution instead. Units are ħ = m = 1 so the
//! stationary equation is ψ'' = (2V(x) - k²)ψ with E = k²/2.

mod potential;

pub use potential::{PotentialModel, Topology};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rk::Stepper;

/// Boundary data of the two fundamental solutions at x = ξ:
/// p = v'(ξ), q = u(ξ), s = -v(ξ), w = u'(ξ), given
/// v(-ξ) = u'(-ξ) = 0 and u(-ξ) = v'(-ξ) = 1.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryData {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub w: f64,
    pub k: f64,
}

impl BoundaryData {
    /// |q·p + s·w − 1|: the fundamental solutions carry unit Wronskian,
    /// so this measures accumulated integration error.
    pub fn wronskian_defect(&self) -> f64 {
        (self.q * self.p + self.s * self.w - 1.0).abs()
    }
}

/// Step-control and guard settings for the fundamental-system solver.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Wronskian drift allowed at any accepted step.
    pub wronskian_tol: f64,
    /// Magnitude bound on the potential over the integration range.
    pub max_potential: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            wronskian_tol: 1e-10,
            max_potential: 1e12,
        }
    }
}

/// Diagnostics from one fundamental-system integration.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveDiagnostics {
    pub max_wronskian_defect: f64,
    pub steps: u64,
}

/// Integrate the fundamental solutions u, v across [-ξ, ξ] at wavenumber
/// k ≥ 0 and return the boundary data (p, q, s, w).
pub fn fundamental_solutions(model: &PotentialModel, k: f64) -> Result<BoundaryData> {
    fundamental_solutions_with(model, k, &SolverConfig::default()).map(|r| r.0)
}

/// [`fundamental_solutions`] with explicit solver settings and diagnostics.
pub fn fundamental_solutions_with(
    model: &PotentialModel,
    k: f64,
    cfg: &SolverConfig,
) -> Result<(BoundaryData, SolveDiagnostics)> {
    if !(k >= 0.0) {
        return Err(Error::Domain(format!("wavenumber k = {k} must be nonnegative")));
    }
    let xi = model.xi;
    guard_stiffness(model, -xi, xi, cfg)?;
    let f = |x: f64, y: &[f64; 4]| {
        let g = 2.0 * model.evaluate(x) - k * k;
        [y[1], g * y[0], y[3], g * y[2]]
    };
    // State [u, u', v, v'] with the independence boundary conditions.
    let mut stepper = Stepper::new(
        -xi,
        [1.0, 0.0, 0.0, 1.0],
        initial_step(model, k),
        cfg.rel_tol,
        cfg.abs_tol,
    );
    stepper.set_max_norm_scaling(true);
    let mut diag = SolveDiagnostics::default();
    while stepper.t < xi {
        stepper.advance(&f, xi)?;
        let y = &stepper.y;
        let defect = (y[0] * y[3] - y[1] * y[2] - 1.0).abs();
        diag.max_wronskian_defect = diag.max_wronskian_defect.max(defect);
        if defect > cfg.wronskian_tol {
            return Err(Error::Integration(format!(
                "wronskian drift {defect:e} exceeded {:e} at x = {}",
                cfg.wronskian_tol, stepper.t
            )));
        }
    }
    diag.steps = stepper.steps_accepted;
    let y = stepper.y;
    Ok((
        BoundaryData {
            p: y[3],
            q: y[0],
            s: -y[2],
            w: y[1],
            k,
        },
        diag,
    ))
}

/// Reflection amplitude for a two-sided model,
/// R = e^(2ikξ)·[k(p−q) + i(sk²−w)] / [k(p+q) + i(sk²+w)].
pub fn reflection_amplitude_general(model: &PotentialModel, k: f64) -> Result<Complex64> {
    require_two_sided(model)?;
    require_positive_k(k)?;
    let b = fundamental_solutions(model, k)?;
    reflection_from_boundary(&b, model.xi)
}

/// Same algebra applied to precomputed boundary data.
pub fn reflection_from_boundary(b: &BoundaryData, xi: f64) -> Result<Complex64> {
    let k = b.k;
    let num = Complex64::new(k * (b.p - b.q), b.s * k * k - b.w);
    let den = Complex64::new(k * (b.p + b.q), b.s * k * k + b.w);
    if den.norm() < 1e-300 {
        return Err(Error::Degenerate(format!("reflection denominator vanished at k = {k}")));
    }
    let phase = Complex64::new(0.0, 2.0 * k * xi).exp();
    Ok(phase * num / den)
}

/// Reflection probability by the closed algebraic form
/// |R|² = [w² + k²((p−q)² − 2sw) + s²k⁴] / [w² + k²((p+q)² + 2sw) + s²k⁴].
pub fn reflection_probability(model: &PotentialModel, k: f64) -> Result<f64> {
    require_two_sided(model)?;
    require_positive_k(k)?;
    let b = fundamental_solutions(model, k)?;
    Ok(reflection_probability_from_boundary(&b))
}

/// The |R|² algebra on existing boundary data.
pub fn reflection_probability_from_boundary(b: &BoundaryData) -> f64 {
    let k2 = b.k * b.k;
    let s2k4 = b.s * b.s * k2 * k2;
    let num = b.w * b.w + k2 * ((b.p - b.q).powi(2) - 2.0 * b.s * b.w) + s2k4;
    let den = b.w * b.w + k2 * ((b.p + b.q).powi(2) + 2.0 * b.s * b.w) + s2k4;
    num / den
}

/// Transmission amplitude, solving the matching equations with the
/// reflection amplitude substituted back.
pub fn transmission_amplitude(model: &PotentialModel, k: f64) -> Result<Complex64> {
    require_two_sided(model)?;
    require_positive_k(k)?;
    let b = fundamental_solutions(model, k)?;
    let r = reflection_from_boundary(&b, model.xi)?;
    let xi = model.xi;
    let e_plus = Complex64::new(0.0, k * xi).exp();
    let e_minus = Complex64::new(0.0, -k * xi).exp();
    // Interior coefficients from continuity at x = -ξ.
    let a = e_minus + r * e_plus;
    let bb = Complex64::new(0.0, k) * (e_minus - r * e_plus);
    // Ψ(ξ) = a·u(ξ) + b·v(ξ) = T e^{ikξ}.
    Ok((a * b.q - bb * b.s) * e_minus)
}

/// Reflection amplitude for a wall model.
///
/// The decaying interior solution is seeded deep inside the classically
/// forbidden region with the WKB exponential (value 1, logarithmic
/// derivative +sqrt(2(V−E))), integrated rightward to ξ with periodic
/// renormalization, and matched against e^(-ikx) + R e^(ikx).
pub fn reflection_amplitude_wall(model: &PotentialModel, k: f64) -> Result<Complex64> {
    if model.topology != Topology::RightWall {
        return Err(Error::Domain("reflection_amplitude_wall requires a RightWall model".into()));
    }
    require_positive_k(k)?;
    let cfg = SolverConfig::default();
    let e = 0.5 * k * k;
    let x_deep = select_seed_point(model, e)?;
    guard_stiffness(model, x_deep, model.xi, &cfg)?;

    let f = |x: f64, y: &[f64; 2]| {
        let g = 2.0 * model.evaluate(x) - k * k;
        [y[1], g * y[0]]
    };
    let kappa = (2.0 * (model.evaluate(x_deep) - e)).sqrt();
    let mut stepper = Stepper::new(x_deep, [1.0, kappa], 1e-6, cfg.rel_tol, cfg.abs_tol);
    stepper.set_max_norm_scaling(true);
    while stepper.t < model.xi {
        stepper.advance(&f, model.xi)?;
        let amp = stepper.y[0].abs().max(stepper.y[1].abs());
        if amp > 1e100 {
            stepper.rescale(1e-100);
        }
        if amp < 1e-100 && stepper.y[0] != 0.0 {
            stepper.rescale(1e100);
        }
    }
    let phi = stepper.y[0];
    let dphi = stepper.y[1];
    if phi == 0.0 && dphi == 0.0 {
        return Err(Error::DecaySelection("interior solution vanished identically".into()));
    }
    // Match against c·(e^{-ikx} + R e^{ikx}) at x = ξ.
    let num = Complex64::new(k * phi, -dphi);
    let den = Complex64::new(k * phi, dphi);
    if den.norm() < 1e-300 {
        return Err(Error::Degenerate(format!("wall matching denominator vanished at k = {k}")));
    }
    let phase = Complex64::new(0.0, -2.0 * k * model.xi).exp();
    Ok(phase * num / den)
}

/// Boundary data Richardson-extrapolated to k → 0.
///
/// (p, q, s, w) are smooth in k² near threshold, so two halvings of
/// k ∈ {1e-3, 5e-4, 2.5e-4} eliminate the k² and k⁴ terms. Returns the
/// extrapolated data at k = 0 and an error estimate (the difference of
/// the last two extrapolation levels, reported for the w component).
pub fn threshold_boundary_data(model: &PotentialModel) -> Result<(BoundaryData, f64)> {
    let ks = [1e-3, 5e-4, 2.5e-4];
    let mut rows: Vec<[f64; 4]> = Vec::new();
    for k in ks {
        let b = fundamental_solutions(model, k)?;
        rows.push([b.p, b.q, b.s, b.w]);
    }
    // Richardson in k²: T(k/2) eliminates k² with weight (4·f(k/2) − f(k))/3.
    let lvl1: Vec<[f64; 4]> = (0..2)
        .map(|i| {
            let mut out = [0.0; 4];
            for j in 0..4 {
                out[j] = (4.0 * rows[i + 1][j] - rows[i][j]) / 3.0;
            }
            out
        })
        .collect();
    let mut final_row = [0.0; 4];
    for j in 0..4 {
        final_row[j] = (16.0 * lvl1[1][j] - lvl1[0][j]) / 15.0;
    }
    let err = (lvl1[1][3] - final_row[3]).abs();
    Ok((
        BoundaryData {
            p: final_row[0],
            q: final_row[1],
            s: final_row[2],
            w: final_row[3],
            k: 0.0,
        },
        err,
    ))
}

fn require_two_sided(model: &PotentialModel) -> Result<()> {
    if model.topology != Topology::TwoSided {
        return Err(Error::Domain("operation requires a TwoSided model".into()));
    }
    Ok(())
}

fn require_positive_k(k: f64) -> Result<()> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber k = {k} must be positive")));
    }
    Ok(())
}

fn guard_stiffness(model: &PotentialModel, lo: f64, hi: f64, cfg: &SolverConfig) -> Result<()> {
    let n = 2000;
    for i in 0..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let v = model.evaluate(x);
        if !v.is_finite() || v.abs() > cfg.max_potential {
            return Err(Error::Stiffness(format!(
                "|V({x})| = {:e} exceeds the solver bound {:e}",
                v.abs(),
                cfg.max_potential
            )));
        }
    }
    Ok(())
}

fn initial_step(model: &PotentialModel, k: f64) -> f64 {
    let scale = (2.0 * model.evaluate(-model.xi).abs() + k * k).sqrt().max(1e-3);
    (0.01 / scale).min(model.xi / 10.0)
}

/// Seed abscissa for the decaying wall solution: V ≥ 50·E and at least
/// ~20 units of WKB action between the seed and the turning point, so the
/// admixture of the unwanted growing component is crushed on the way out.
fn select_seed_point(model: &PotentialModel, e: f64) -> Result<f64> {
    // Locate the classical turning point V(x) = E, scanning from the free
    // edge inward.
    let n_scan = 20_000;
    let span = model.xi - model.x_min;
    let dx = span / n_scan as f64;
    let mut x_turn = None;
    let mut x = model.xi;
    while x > model.x_min {
        if model.evaluate(x) > e {
            // refine by bisection on [x, x + dx]
            let (mut lo, mut hi) = (x, x + dx);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if model.evaluate(mid) > e {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            x_turn = Some(lo);
            break;
        }
        x -= dx;
    }
    let Some(x_turn) = x_turn else {
        return Err(Error::DecaySelection(format!(
            "no classical turning point with V >= E = {e:e} inside the model domain"
        )));
    };
    // Walk further in, accumulating WKB action.
    let mut action = 0.0;
    let mut x = x_turn;
    while x - dx >= model.x_min {
        let mid = x - 0.5 * dx;
        let v = model.evaluate(mid);
        if v > e {
            action += (2.0 * (v - e)).sqrt() * dx;
        }
        x -= dx;
        if action >= 20.0 && model.evaluate(x) >= 50.0 * e {
            return Ok(x);
        }
    }
    Err(Error::DecaySelection(format!(
        "wall too soft: accumulated action {action:.2} (< 20) before reaching the domain edge"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_particle_closed_form() {
        let model = PotentialModel::two_sided(|_| 0.0, 1.0, 0.0).unwrap();
        for &k in &[0.3, 1.0, 4.0] {
            let b = fundamental_solutions(&model, k).unwrap();
            let arg = 2.0 * k * model.xi;
            assert!((b.p - arg.cos()).abs() < 1e-11, "k={k}");
            assert!((b.q - arg.cos()).abs() < 1e-11);
            assert!((b.s + arg.sin() / k).abs() < 1e-11);
            assert!((b.w + k * arg.sin()).abs() < 1e-11);
            let r = reflection_amplitude_general(&model, k).unwrap();
            assert!(r.norm() < 1e-11, "free-particle R must vanish, got {r}");
            let t = transmission_amplitude(&model, k).unwrap();
            assert!((t - Complex64::new(1.0, 0.0)).norm() < 1e-11);
        }
    }

    #[test]
    fn free_particle_threshold() {
        // k = 0 is legal for the fundamental system: u = 1, v = x + ξ.
        let model = PotentialModel::two_sided(|_| 0.0, 1.0, 0.0).unwrap();
        let b = fundamental_solutions(&model, 0.0).unwrap();
        assert!((b.p - 1.0).abs() < 1e-12);
        assert!((b.q - 1.0).abs() < 1e-12);
        assert!((b.s + 2.0).abs() < 1e-12);
        assert!(b.w.abs() < 1e-12);
    }

    #[test]
    fn square_well_closed_form_boundary_data() {
        // V = -V0 on |x| <= a: u = cos(K(x+a)), v = sin(K(x+a))/K with
        // K² = k² + 2V0.
        let v0 = 0.7;
        let a = 1.3;
        let model = PotentialModel::square_well(v0, a).unwrap();
        for &k in &[0.2, 0.9] {
            let kk = (k * k + 2.0 * v0).sqrt();
            let b = fundamental_solutions(&model, k).unwrap();
            let arg = 2.0 * kk * a;
            assert!((b.q - arg.cos()).abs() < 1e-9, "k={k}");
            assert!((b.p - arg.cos()).abs() < 1e-9);
            assert!((b.s + arg.sin() / kk).abs() < 1e-9);
            assert!((b.w + kk * arg.sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn wronskian_defect_is_tiny() {
        let model = PotentialModel::gaussian_well(2.0, 0.8).unwrap();
        let (b, diag) = fundamental_solutions_with(&model, 0.5, &SolverConfig::default()).unwrap();
        assert!(b.wronskian_defect() < 1e-10);
        assert!(diag.max_wronskian_defect < 1e-10);
    }

    #[test]
    fn stiffness_guard_trips() {
        let model = PotentialModel::two_sided(|x| if x.abs() < 0.5 { 1e15 } else { 0.0 }, 1.0, 0.0).unwrap();
        assert!(matches!(
            fundamental_solutions(&model, 1.0),
            Err(Error::Stiffness(_))
        ));
    }
}
