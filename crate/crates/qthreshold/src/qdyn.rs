//! Quantum time-domain engine.
//!
//! A coherent state prepared in the asymptotic region is expanded over
//! the exact scattering states and propagated by quadrature over k. Each
//! (k, z) pair contributes a t-independent complex weight (Gaussian
//! window, reflection amplitude and the two Kummer factors); the time
//! evolution is then a pure phase rotation, so the weights are cached and
//! shared across the whole time axis. Grid evaluation parallelizes over
//! cells once the cache is built.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{DensityProvenance, SpaceTimeDensity};
use crate::morse::{exp_half_weighted, MorseParams};
use crate::par;
use crate::phase::cis_neg;

/// Minimum-uncertainty Gaussian wavepacket centered at (z_i, -p_i) with
/// width parameter Γ (position variance 1/(2Γ)).
#[derive(Debug, Clone, Copy)]
pub struct CoherentState {
    pub z_i: f64,
    /// Magnitude of the incidence momentum (the packet moves toward -z).
    pub p_i: f64,
    pub gamma: f64,
}

impl CoherentState {
    pub fn new(z_i: f64, p_i: f64, gamma: f64) -> Result<Self> {
        if !(p_i > 0.0 && gamma > 0.0 && z_i.is_finite()) {
            return Err(Error::Domain(format!(
                "coherent state requires p_i > 0 and gamma > 0 (z_i = {z_i}, p_i = {p_i}, gamma = {gamma})"
            )));
        }
        Ok(CoherentState { z_i, p_i, gamma })
    }

    /// ⟨z|Φ⟩.
    pub fn amplitude(&self, hbar: f64, z: f64) -> Complex64 {
        let norm = (self.gamma / std::f64::consts::PI).powf(0.25);
        let envelope = (-0.5 * self.gamma * (z - self.z_i).powi(2)).exp();
        let phase = self.p_i * (self.z_i - z) / hbar;
        norm * envelope * Complex64::new(phase.cos(), phase.sin())
    }

    /// |⟨z|Φ⟩|².
    pub fn density(&self, z: f64) -> f64 {
        (self.gamma / std::f64::consts::PI).sqrt()
            * (-self.gamma * (z - self.z_i).powi(2)).exp()
    }
}

/// Quadrature rule for the k integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    /// Uniform composite trapezoid (the production rule).
    Trapezoid,
    /// Composite 16-point Gauss–Legendre panels, for convergence studies.
    GaussLegendre,
}

/// Wavenumber grid for the propagation quadrature.
#[derive(Debug, Clone, Copy)]
pub struct KGrid {
    pub k_min: f64,
    pub k_max: f64,
    pub n: usize,
    pub rule: QuadratureRule,
}

impl KGrid {
    /// Default window [p_i/ħ − 7√Γ, p_i/ħ + 7√Γ] with 5·10⁴ points; the
    /// overlap with the packet is negligible outside.
    pub fn for_state(state: &CoherentState, hbar: f64) -> Self {
        let k_i = state.p_i / hbar;
        let half = 7.0 * state.gamma.sqrt();
        KGrid {
            k_min: k_i - half,
            k_max: k_i + half,
            n: 50_000,
            rule: QuadratureRule::Trapezoid,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_rule(mut self, rule: QuadratureRule) -> Self {
        self.rule = rule;
        self
    }

    /// Same window with 2n − 1 points (every interval halved).
    pub fn refined(&self) -> Self {
        KGrid {
            n: 2 * self.n - 1,
            ..*self
        }
    }

    /// Quadrature nodes and weights.
    pub fn nodes_weights(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.n < 2 || !(self.k_max > self.k_min) {
            return Err(Error::Domain(format!(
                "k grid needs n >= 2 and k_max > k_min (n = {}, window [{}, {}])",
                self.n, self.k_min, self.k_max
            )));
        }
        match self.rule {
            QuadratureRule::Trapezoid => {
                let dk = (self.k_max - self.k_min) / (self.n - 1) as f64;
                let nodes = (0..self.n).map(|i| self.k_min + dk * i as f64).collect();
                let mut weights = vec![dk; self.n];
                weights[0] = 0.5 * dk;
                weights[self.n - 1] = 0.5 * dk;
                Ok((nodes, weights))
            }
            QuadratureRule::GaussLegendre => {
                let panels = (self.n / 16).max(1);
                let (xs, ws) = gauss_legendre_16();
                let width = (self.k_max - self.k_min) / panels as f64;
                let mut nodes = Vec::with_capacity(panels * 16);
                let mut weights = Vec::with_capacity(panels * 16);
                for p in 0..panels {
                    let a = self.k_min + width * p as f64;
                    let mid = a + 0.5 * width;
                    for i in 0..16 {
                        nodes.push(mid + 0.5 * width * xs[i]);
                        weights.push(0.5 * width * ws[i]);
                    }
                }
                Ok((nodes, weights))
            }
        }
    }
}

/// 16-point Gauss–Legendre nodes/weights on [-1, 1], by Newton iteration
/// on the Legendre recurrence.
fn gauss_legendre_16() -> ([f64; 16], [f64; 16]) {
    let n = 16usize;
    let mut x = [0.0; 16];
    let mut w = [0.0; 16];
    for i in 0..n {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_p(n, t);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_p(n, t);
        x[n - 1 - i] = t;
        w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

fn legendre_p(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Overlap ⟨k⁺|Φ⟩ with the scattering state at wavenumber k, using the
/// asymptotic form of the stationary wavefunction (the packet must be
/// localized in the asymptotic region).
pub fn overlap_k(params: &MorseParams, state: &CoherentState, k: f64) -> Result<Complex64> {
    check_asymptotic(params, state)?;
    let hbar = params.hbar;
    let norm = (1.0 / (std::f64::consts::PI * state.gamma)).powf(0.25);
    let k_i = state.p_i / hbar;
    let g1 = (-(k_i - k).powi(2) / (2.0 * state.gamma)).exp();
    let g2 = (-(k_i + k).powi(2) / (2.0 * state.gamma)).exp();
    let e_plus = Complex64::new(0.0, k * state.z_i).exp();
    let r = if k == 0.0 {
        Complex64::new(-1.0, 0.0)
    } else {
        params.reflection_coeff(k)?
    };
    Ok(norm * (e_plus * g1 + r.conj() * e_plus.conj() * g2))
}

/// Packet-localization precondition: the coherent state's density at
/// z0 + 10 d must be below 1e-12.
fn check_asymptotic(params: &MorseParams, state: &CoherentState) -> Result<()> {
    let probe = params.z0 + 10.0 * params.d;
    let tail = state.density(probe);
    if tail > 1e-12 {
        return Err(Error::Asymptotics(format!(
            "coherent state is not localized in the asymptotic region: |Phi({probe})|^2 = {tail:e}"
        )));
    }
    Ok(())
}

/// Per-k tables shared by every (z, t) evaluation.
struct KTables {
    k: Vec<f64>,
    /// Quadrature weight × Gaussian window × e^(i k z_i).
    g: Vec<Complex64>,
    /// Reflection amplitude R(k).
    r: Vec<Complex64>,
    /// Kinetic phase rate ħk²/(2m).
    omega: Vec<f64>,
    /// Overall prefactor (πΓ)^(-1/4) / sqrt(2π).
    norm: f64,
}

fn build_k_tables(params: &MorseParams, state: &CoherentState, kgrid: &KGrid) -> Result<KTables> {
    check_asymptotic(params, state)?;
    let (nodes, weights) = kgrid.nodes_weights()?;
    let hbar = params.hbar;
    let k_i = state.p_i / hbar;
    let cols: Vec<Result<(Complex64, Complex64, f64)>> = par::map_indexed(nodes.len(), |j| {
        let k = nodes[j];
        let gauss = (-(k_i - k).powi(2) / (2.0 * state.gamma)).exp();
        let e_zi = Complex64::new(0.0, k * state.z_i).exp();
        let r = if k == 0.0 {
            Complex64::new(-1.0, 0.0)
        } else {
            params.reflection_coeff(k)?
        };
        let omega = hbar * k * k / (2.0 * params.m);
        Ok((weights[j] * gauss * e_zi, r, omega))
    });
    let mut g = Vec::with_capacity(nodes.len());
    let mut r = Vec::with_capacity(nodes.len());
    let mut omega = Vec::with_capacity(nodes.len());
    for c in cols {
        let (gj, rj, oj) = c?;
        g.push(gj);
        r.push(rj);
        omega.push(oj);
    }
    let norm = (1.0 / (std::f64::consts::PI * state.gamma)).powf(0.25)
        / (2.0 * std::f64::consts::PI).sqrt();
    Ok(KTables {
        k: nodes,
        g,
        r,
        omega,
        norm,
    })
}

/// The t-independent weight C(k, z) such that
/// amplitude(z, t) = norm · Σ_k e^(-i ω_k t) C(k, z).
fn kz_weight(params: &MorseParams, tab: &KTables, j: usize, z: f64, y: f64) -> Result<Complex64> {
    let k = tab.k[j];
    let kd = k * params.d;
    let yy = params.y_scale();
    let (f_plus, f_minus) = if y < 1e-18 {
        // M -> 1 at the origin of the series; e^(-y/2) -> 1.
        (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    } else {
        let a_plus = Complex64::new((1.0 - yy) / 2.0, kd);
        let b_plus = Complex64::new(1.0, 2.0 * kd);
        let a_minus = Complex64::new((1.0 - yy) / 2.0, -kd);
        let b_minus = Complex64::new(1.0, -2.0 * kd);
        (
            exp_half_weighted(a_plus, b_plus, y)?,
            exp_half_weighted(a_minus, b_minus, y)?,
        )
    };
    let e_min = Complex64::new(0.0, -k * z).exp();
    let e_plus = e_min.conj();
    Ok(tab.g[j] * (e_min * f_plus + tab.r[j] * e_plus * f_minus))
}

/// One full z-column of C(k, z), parallel over k.
fn kz_column(params: &MorseParams, tab: &KTables, z: f64) -> Result<Vec<Complex64>> {
    let y = params.y_of_z(z)?;
    let cols: Vec<Result<Complex64>> =
        par::map_indexed(tab.k.len(), |j| kz_weight(params, tab, j, z, y));
    cols.into_iter().collect()
}

/// Convergence and self-test diagnostics from a propagation run.
#[derive(Debug, Clone, Copy, Default)]
pub struct PropagateDiagnostics {
    /// Relative error of the t = 0 startup identity at the packet center.
    pub t0_identity_rel_err: f64,
    /// Largest density change (relative to the grid maximum) when the
    /// k grid is refined, over the spot-checked cells.
    pub quadrature_spotcheck_rel: f64,
    /// True if the spot check exceeded 1e-6.
    pub quadrature_warning: bool,
}

/// Result of a propagation run.
#[derive(Debug, Clone)]
pub struct PropagateOutput {
    pub density: SpaceTimeDensity,
    /// Complex amplitudes, same layout as the density grid, if requested.
    pub amplitude: Option<Vec<Complex64>>,
    pub diagnostics: PropagateDiagnostics,
}

/// Evolve the coherent state on a (z, t) grid.
///
/// Always runs two cheap validations: the t = 0 identity against the
/// initial Gaussian at the packet center, and a quadrature spot check that
/// re-evaluates ~100 cells on the refined k grid (cells drawn from 10
/// random columns × 10 random times).
pub fn propagate(
    params: &MorseParams,
    state: &CoherentState,
    kgrid: &KGrid,
    z_axis: &[f64],
    t_axis: &[f64],
    want_amplitude: bool,
) -> Result<PropagateOutput> {
    let tab = build_k_tables(params, state, kgrid)?;
    let nz = z_axis.len();
    let nt = t_axis.len();
    if nz < 2 || nt < 2 {
        return Err(Error::Domain("propagation grid needs at least 2x2 points".into()));
    }

    let mut amp = vec![Complex64::new(0.0, 0.0); nz * nt];
    let block = 256usize.min(nz);
    let mut phases: Vec<Complex64> = Vec::new();

    for z_start in (0..nz).step_by(block) {
        let z_end = (z_start + block).min(nz);
        let cols: Vec<Result<Vec<Complex64>>> = par::map_indexed(z_end - z_start, |i| {
            kz_column(params, &tab, z_axis[z_start + i])
        });
        let mut cache: Vec<Vec<Complex64>> = Vec::with_capacity(z_end - z_start);
        for c in cols {
            cache.push(c?);
        }
        // Rows of the output for this block, parallel over t.
        let rows: Vec<Vec<Complex64>> = par::map_indexed(nt, |it| {
            let t = t_axis[it];
            let ph: Vec<Complex64> = tab.omega.iter().map(|&o| cis_neg(o, t)).collect();
            cache
                .iter()
                .map(|col| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (c, p) in col.iter().zip(ph.iter()) {
                        acc += c * p;
                    }
                    tab.norm * acc
                })
                .collect()
        });
        let _ = &mut phases;
        for (it, row) in rows.into_iter().enumerate() {
            amp[it * nz + z_start..it * nz + z_end].copy_from_slice(&row);
        }
    }

    let values: Vec<f64> = amp.iter().map(|a| a.norm_sqr()).collect();
    let density = SpaceTimeDensity::new(
        z_axis.to_vec(),
        t_axis.to_vec(),
        values,
        DensityProvenance::Quantum,
    )?;

    // Startup self-test: the expansion at t = 0 must reproduce the packet.
    let t0_err = t0_identity_error(params, state, &tab)?;
    if t0_err > 1e-6 {
        return Err(Error::Convergence(format!(
            "t = 0 identity failed: relative error {t0_err:e} at the packet center \
             (k window truncation?)"
        )));
    }

    // Quadrature spot check on the refined grid.
    let (spot_rel, warn) = spot_check(params, state, kgrid, z_axis, t_axis, &density)?;

    Ok(PropagateOutput {
        density,
        amplitude: if want_amplitude { Some(amp) } else { None },
        diagnostics: PropagateDiagnostics {
            t0_identity_rel_err: t0_err,
            quadrature_spotcheck_rel: spot_rel,
            quadrature_warning: warn,
        },
    })
}

fn t0_identity_error(params: &MorseParams, state: &CoherentState, tab: &KTables) -> Result<f64> {
    let z = state.z_i;
    let col = kz_column(params, tab, z)?;
    let amp0: Complex64 = tab.norm * col.iter().sum::<Complex64>();
    let want = state.density(z);
    Ok((amp0.norm_sqr() - want).abs() / want)
}

fn spot_check(
    params: &MorseParams,
    state: &CoherentState,
    kgrid: &KGrid,
    z_axis: &[f64],
    t_axis: &[f64],
    base: &SpaceTimeDensity,
) -> Result<(f64, bool)> {
    let fine = kgrid.refined();
    let tab = build_k_tables(params, state, &fine)?;
    let max_density = base.max_value().max(1e-300);
    // Small deterministic LCG; 10 columns x 10 rows.
    let mut lcg: u64 = 0x9e3779b97f4a7c15 ^ (z_axis.len() as u64) ^ ((t_axis.len() as u64) << 32);
    let mut next = || {
        lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (lcg >> 33) as usize
    };
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let iz = next() % z_axis.len();
        let col = kz_column(params, &tab, z_axis[iz])?;
        for _ in 0..10 {
            let it = next() % t_axis.len();
            let t = t_axis[it];
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, &o) in col.iter().zip(tab.omega.iter()) {
                acc += c * cis_neg(o, t);
            }
            let refined = (tab.norm * acc).norm_sqr();
            let rel = (refined - base.at(iz, it)).abs() / max_density;
            worst = worst.max(rel);
        }
    }
    Ok((worst, worst > 1e-6))
}

/// Arrival correlation evaluator: C_t(y; Φ) at a fixed position for many
/// times, sharing the per-k cache.
pub struct CorrelationEvaluator {
    weights: Vec<Complex64>,
    omega: Vec<f64>,
    norm: f64,
}

impl CorrelationEvaluator {
    pub fn new(
        params: &MorseParams,
        state: &CoherentState,
        kgrid: &KGrid,
        y: f64,
    ) -> Result<Self> {
        let tab = build_k_tables(params, state, kgrid)?;
        let weights = kz_column(params, &tab, y)?;
        Ok(CorrelationEvaluator {
            weights,
            omega: tab.omega,
            norm: tab.norm,
        })
    }

    /// C_t(y; Φ) = |⟨y|K_t|Φ⟩|².
    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, &o) in self.weights.iter().zip(self.omega.iter()) {
            acc += c * cis_neg(o, t);
        }
        (self.norm * acc).norm_sqr()
    }

    /// Many times at once, parallel over t.
    pub fn eval_many(&self, ts: &[f64]) -> Vec<f64> {
        par::map_indexed(ts.len(), |i| self.eval(ts[i]))
    }
}

/// Density correlation C_t(y; Φ) at a single (y, t).
pub fn correlation_at(
    params: &MorseParams,
    state: &CoherentState,
    kgrid: &KGrid,
    y: f64,
    t: f64,
) -> Result<f64> {
    Ok(CorrelationEvaluator::new(params, state, kgrid, y)?.eval(t))
}

/// Result of the quantum mean-flight-time quadrature.
#[derive(Debug, Clone, Copy)]
pub struct FlightTimeQm {
    pub mean: f64,
    /// ∫ C_t dt over the final window.
    pub normalization: f64,
    /// Window end actually used after extensions.
    pub t_end: f64,
}

/// Mean flight time ⟨t⟩_QM = ∫ t C_t dt / ∫ C_t dt for arrival at y.
///
/// The window starts at `t_window` (defaults to [0, 2.2·m(y+z_i+2|z_TP|)/p_i])
/// and is extended by factors of 1.6 until the newest segment contributes
/// less than 1e-6 of both integrals; C_t must have decayed below 1e-8 of
/// its maximum at the end.
pub fn mean_flight_time_qm(
    params: &MorseParams,
    state: &CoherentState,
    kgrid: &KGrid,
    y: f64,
    t_window: Option<(f64, f64)>,
) -> Result<FlightTimeQm> {
    let eval = CorrelationEvaluator::new(params, state, kgrid, y)?;
    let (t_lo, mut t_hi) = match t_window {
        Some(w) => w,
        None => {
            let z_tp = params.turning_point(
                state.p_i * state.p_i / (2.0 * params.m),
            )?;
            let free = params.m * (y + state.z_i + 2.0 * z_tp.abs()) / state.p_i;
            (0.0, 2.2 * free)
        }
    };
    if !(t_hi > t_lo) {
        return Err(Error::Domain(format!("bad time window [{t_lo}, {t_hi}]")));
    }

    let base_n = 6000usize;
    let (mut i0, mut i1, mut c_max) = simpson_moments(&eval, t_lo, t_hi, base_n);
    let mut c_end;
    let mut extensions = 0;
    loop {
        // Contribution of one more 1.6× segment.
        let seg_hi = 1.6 * t_hi;
        let seg_n = (base_n / 3).max(512);
        let (s0, s1, s_max) = simpson_moments(&eval, t_hi, seg_hi, seg_n);
        c_max = c_max.max(s_max);
        if s0 <= 1e-6 * i0 && s1 <= 1e-6 * i1 {
            c_end = eval.eval(t_hi);
            break;
        }
        i0 += s0;
        i1 += s1;
        t_hi = seg_hi;
        extensions += 1;
        if extensions > 25 {
            c_end = eval.eval(t_hi);
            if c_end > 1e-8 * c_max {
                return Err(Error::Window(format!(
                    "correlation has not decayed at t = {t_hi:e}: C = {c_end:e} vs max {c_max:e}"
                )));
            }
            break;
        }
    }
    if c_end > 1e-8 * c_max {
        return Err(Error::Window(format!(
            "correlation has not decayed at the window end t = {t_hi:e}: C/Cmax = {:e}",
            c_end / c_max
        )));
    }
    if i0 <= 0.0 {
        return Err(Error::Window("correlation integral vanished over the window".into()));
    }
    Ok(FlightTimeQm {
        mean: i1 / i0,
        normalization: i0,
        t_end: t_hi,
    })
}

/// Composite Simpson of (C, t·C) plus the max of C over the panel.
fn simpson_moments(eval: &CorrelationEvaluator, a: f64, b: f64, n: usize) -> (f64, f64, f64) {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let ts: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
    let cs = eval.eval_many(&ts);
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut cmax = 0.0f64;
    for (i, (&t, &c)) in ts.iter().zip(cs.iter()).enumerate() {
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        s0 += w * c;
        s1 += w * t * c;
        cmax = cmax.max(c);
    }
    (s0 * h / 3.0, s1 * h / 3.0, cmax)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row1() -> (MorseParams, CoherentState) {
        (
            MorseParams::reference(),
            CoherentState::new(100.0, 1.0, 1e-2).unwrap(),
        )
    }

    #[test]
    fn coherent_state_is_normalized() {
        let s = CoherentState::new(50.0, 0.5, 0.04).unwrap();
        // ∫ |Φ|² dz by trapezoid over ±8σ
        let sigma = (1.0 / (2.0 * s.gamma)).sqrt();
        let n = 4000;
        let lo = s.z_i - 8.0 * sigma;
        let hi = s.z_i + 8.0 * sigma;
        let dz = (hi - lo) / n as f64;
        let total: f64 = (0..=n).map(|i| s.density(lo + dz * i as f64) * dz).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn overlap_peaks_at_incidence_momentum() {
        let (p, s) = row1();
        let k_i = s.p_i / p.hbar;
        let at_peak = overlap_k(&p, &s, k_i).unwrap().norm();
        let off = overlap_k(&p, &s, k_i + 5.0 * s.gamma.sqrt()).unwrap().norm();
        assert!(at_peak > 100.0 * off);
        // second (reflected) term is suppressed by exp(-2 p_i²/(ħ²Γ)):
        // the peak is the bare Gaussian weight.
        let norm = (1.0 / (std::f64::consts::PI * s.gamma)).powf(0.25);
        assert!((at_peak - norm).abs() < 1e-10 * norm);
    }

    #[test]
    fn overlap_vanishes_outside_the_window() {
        let (p, s) = row1();
        let grid = KGrid::for_state(&s, p.hbar);
        let peak = overlap_k(&p, &s, s.p_i / p.hbar).unwrap().norm();
        for k in [grid.k_min, grid.k_max] {
            let v = overlap_k(&p, &s, k).unwrap().norm();
            assert!(v < 1e-10 * peak, "window edge k = {k} has overlap {v:e}");
        }
    }

    #[test]
    fn completeness_over_the_window() {
        let (p, s) = row1();
        let grid = KGrid::for_state(&s, p.hbar).with_n(4001);
        let (nodes, weights) = grid.nodes_weights().unwrap();
        let total: f64 = nodes
            .iter()
            .zip(weights.iter())
            .map(|(&k, &w)| overlap_k(&p, &s, k).unwrap().norm_sqr() * w)
            .sum();
        assert!(
            (total - 1.0).abs() < 1e-6,
            "completeness integral = {total}"
        );
    }

    #[test]
    fn asymptotics_guard_trips_for_misplaced_packets() {
        let p = MorseParams::reference();
        let bad = CoherentState::new(5.0, 1.0, 1e-2).unwrap();
        assert!(matches!(
            overlap_k(&p, &bad, 1.0),
            Err(Error::Asymptotics(_))
        ));
    }

    #[test]
    fn gauss_legendre_rule_integrates_polynomials() {
        let g = KGrid {
            k_min: 0.0,
            k_max: 2.0,
            n: 32,
            rule: QuadratureRule::GaussLegendre,
        };
        let (x, w) = g.nodes_weights().unwrap();
        let integral: f64 = x.iter().zip(w.iter()).map(|(&x, &w)| w * x * x * x).sum();
        assert!((integral - 4.0).abs() < 1e-12);
    }

    #[test]
    fn t0_density_matches_initial_packet() {
        let (p, s) = row1();
        let grid = KGrid::for_state(&s, p.hbar).with_n(3001);
        let sigma = (1.0 / (2.0 * s.gamma)).sqrt();
        let z_axis: Vec<f64> = crate::grid::linspace(s.z_i - 3.0 * sigma, s.z_i + 3.0 * sigma, 41);
        let t_axis = vec![0.0, 1.0];
        let out = propagate(&p, &s, &grid, &z_axis, &t_axis, false).unwrap();
        assert!(out.diagnostics.t0_identity_rel_err < 1e-7);
        for (i, &z) in z_axis.iter().enumerate() {
            let want = s.density(z);
            let got = out.density.at(i, 0);
            if want > 1e-6 {
                assert!(
                    (got - want).abs() / want < 1e-5,
                    "z = {z}: got {got:e}, want {want:e}"
                );
            }
        }
    }
}
