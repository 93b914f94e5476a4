//! Potential models for the general 1D reflection solver: closures,
//! named built-ins and tabulated data with cubic interpolation.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::morse::MorseParams;

/// Scattering topology of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// Potential supported on a finite interval, free on both sides.
    TwoSided,
    /// Half-line scattering: an impenetrable wall closes the axis on the
    /// left and the free region extends to +∞ (incidence from the right,
    /// asymptotic form e^(-ikx) + R e^(ikx)).
    RightWall,
}

/// A 1D potential with finite support radius ξ.
///
/// The solver works in units ħ = m = 1, so the stationary equation reads
/// ψ'' = (2 V(x) - k²) ψ.
#[derive(Clone)]
pub struct PotentialModel {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Support half-width: |V| ≤ `support_tol` outside (for the free side(s)).
    pub xi: f64,
    pub topology: Topology,
    pub support_tol: f64,
    /// Leftmost coordinate the solver may probe (wall topologies).
    pub x_min: f64,
}

impl std::fmt::Debug for PotentialModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PotentialModel")
            .field("xi", &self.xi)
            .field("topology", &self.topology)
            .field("support_tol", &self.support_tol)
            .finish_non_exhaustive()
    }
}

impl PotentialModel {
    /// Two-sided model from a closure; |V(±ξ)| must not exceed `support_tol`.
    pub fn two_sided<F>(f: F, xi: f64, support_tol: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(xi > 0.0) {
            return Err(Error::Domain(format!("support half-width xi = {xi} must be positive")));
        }
        // Probe just outside the interval so sharp-edged wells whose
        // support closes exactly at ±ξ validate cleanly.
        let eps = 1e-9 * xi;
        for x in [-(xi + eps), xi + eps] {
            let v = f(x);
            if v.abs() > support_tol {
                return Err(Error::Domain(format!(
                    "potential is not negligible at the support edge: |V({x})| = {:e} > {support_tol:e}",
                    v.abs()
                )));
            }
        }
        Ok(PotentialModel {
            f: Arc::new(f),
            xi,
            topology: Topology::TwoSided,
            support_tol,
            x_min: -xi,
        })
    }

    /// Two-sided model with ξ grown automatically until |V(±ξ)| < `support_tol`.
    pub fn two_sided_auto<F>(f: F, support_tol: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut xi = 1.0;
        for _ in 0..80 {
            if f(xi).abs() <= support_tol && f(-xi).abs() <= support_tol {
                return Self::two_sided(f, xi, support_tol);
            }
            xi *= 1.5;
        }
        Err(Error::Domain(
            "could not find a support radius: the potential does not decay".into(),
        ))
    }

    /// Wall model: free for x ≥ ξ, repulsive wall somewhere left of it.
    /// `x_min` bounds how deep the solver may seed the decaying solution.
    pub fn right_wall<F>(f: F, xi: f64, support_tol: f64, x_min: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(x_min < xi) {
            return Err(Error::Domain(format!("x_min = {x_min} must lie left of xi = {xi}")));
        }
        let v_edge = f(xi).abs();
        if v_edge > support_tol {
            return Err(Error::Domain(format!(
                "potential is not negligible at the free edge: |V(xi)| = {v_edge:e} > {support_tol:e}"
            )));
        }
        Ok(PotentialModel {
            f: Arc::new(f),
            xi,
            topology: Topology::RightWall,
            support_tol,
            x_min,
        })
    }

    /// Square well of depth v0 > 0 on |x| ≤ a.
    pub fn square_well(v0: f64, a: f64) -> Result<Self> {
        Self::two_sided(move |x| if x.abs() <= a { -v0 } else { 0.0 }, a, 0.0)
    }

    /// Square barrier of height v0 > 0 on |x| ≤ a.
    pub fn square_barrier(v0: f64, a: f64) -> Result<Self> {
        Self::two_sided(move |x| if x.abs() <= a { v0 } else { 0.0 }, a, 0.0)
    }

    /// Gaussian well -v0 exp(-x²/(2σ²)).
    pub fn gaussian_well(v0: f64, sigma: f64) -> Result<Self> {
        let support_tol = 1e-12 * v0;
        let xi = sigma * (2.0 * (v0 / support_tol).ln()).sqrt();
        Self::two_sided(move |x| -v0 * (-x * x / (2.0 * sigma * sigma)).exp(), xi, support_tol)
    }

    /// Morse potential as a wall model (requires m = ħ = 1 parameters so
    /// the solver's reduced units match).
    pub fn morse_wall(params: MorseParams) -> Result<Self> {
        if (params.m - 1.0).abs() > 1e-12 || (params.hbar - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(
                "morse_wall requires m = hbar = 1 (the solver works in reduced units)".into(),
            ));
        }
        let support_tol = 1e-12 * params.v;
        // Tail is -2V e^(-(z-z0)/d); solve |V(xi)| = support_tol.
        let xi = params.z0 + params.d * (2.0 * params.v / support_tol).ln();
        let x_min = params.z0 - 30.0 * params.d;
        Self::right_wall(move |x| params.potential(x), xi, support_tol, x_min)
    }

    /// Tabulated potential with natural cubic-spline interpolation;
    /// outside the table the potential is zero.
    pub fn from_table(points: &[(f64, f64)], topology: Topology) -> Result<Self> {
        let spline = CubicSpline::new(points)?;
        let lo = spline.x[0];
        let hi = spline.x[spline.x.len() - 1];
        let xi = hi.abs().max(lo.abs());
        let support_tol = 1e-9
            * points
                .iter()
                .map(|p| p.1.abs())
                .fold(0.0, f64::max)
                .max(1e-30);
        let f = move |x: f64| spline.eval(x);
        match topology {
            Topology::TwoSided => Self::two_sided(f, xi, support_tol.max(f(xi).abs()).max(f(-xi).abs())),
            Topology::RightWall => Self::right_wall(f, hi, support_tol.max(f(hi).abs()), lo),
        }
    }

    /// V(x).
    pub fn evaluate(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

/// Natural cubic spline on sorted knots.
#[derive(Debug, Clone)]
struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::Config("tabulated potential needs at least 3 points".into()));
        }
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if pts.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Config("tabulated potential has duplicate abscissae".into()));
        }
        let n = pts.len();
        let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
        // Tridiagonal solve for natural boundary conditions (Thomas).
        let mut a = vec![0.0; n];
        let mut b = vec![2.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            a[i] = h0 / (h0 + h1);
            c[i] = h1 / (h0 + h1);
            d[i] = 6.0 / (h0 + h1) * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        cp[0] = c[0] / b[0];
        dp[0] = d[0] / b[0];
        for i in 1..n {
            let denom = b[i] - a[i] * cp[i - 1];
            cp[i] = c[i] / denom;
            dp[i] = (d[i] - a[i] * dp[i - 1]) / denom;
        }
        let mut m = vec![0.0; n];
        m[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = dp[i] - cp[i] * m[i + 1];
        }
        Ok(CubicSpline { x, y, m })
    }

    fn eval(&self, xq: f64) -> f64 {
        let n = self.x.len();
        if xq < self.x[0] || xq > self.x[n - 1] {
            return 0.0;
        }
        let i = match self.x.binary_search_by(|a| a.partial_cmp(&xq).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let s = 1.0 - t;
        s * self.y[i]
            + t * self.y[i + 1]
            + h * h / 6.0 * ((s * s * s - s) * self.m[i] + (t * t * t - t) * self.m[i + 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_models_validate() {
        assert!(PotentialModel::square_well(1.0, 1.0).is_ok());
        assert!(PotentialModel::square_barrier(1.0, 1.0).is_ok());
        let g = PotentialModel::gaussian_well(2.0, 0.7).unwrap();
        assert!(g.evaluate(0.0) + 2.0 < 1e-14);
        assert!(g.evaluate(g.xi).abs() <= g.support_tol * 1.0001);
    }

    #[test]
    fn morse_wall_support() {
        let m = PotentialModel::morse_wall(MorseParams::reference()).unwrap();
        assert!(m.evaluate(m.xi).abs() <= m.support_tol * 1.01);
        assert!(m.evaluate(-0.9) > 1.0);
    }

    #[test]
    fn spline_reproduces_smooth_samples() {
        let pts: Vec<(f64, f64)> = (0..60)
            .map(|i| {
                let x = -3.0 + 0.1 * i as f64;
                (x, (-x * x).exp())
            })
            .collect();
        let model = PotentialModel::from_table(&pts, Topology::TwoSided).unwrap();
        for &x in &[-1.234, 0.0, 0.777, 2.5] {
            let err = (model.evaluate(x) - (-x * x).exp()).abs();
            assert!(err < 2e-5, "x = {x}: err = {err:e}");
        }
    }
}
