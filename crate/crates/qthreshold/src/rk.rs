//! Embedded Dormand–Prince 5(4) stepper for small fixed-size systems.
//!
//! Used by the general-potential solver (4-component fundamental system
//! over position) and the trajectory engine (phase-space pair over time).
//! The caller drives the integration one accepted step at a time, which
//! keeps event handling (stop planes, sampling instants, renormalization)
//! in the caller where the context lives.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const A7: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];

/// b_i − b*_i, the 5th-minus-4th-order error weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One-step-at-a-time adaptive integrator state.
pub struct Stepper<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    h: f64,
    dir: f64,
    rtol: f64,
    atol: [f64; N],
    /// Measure errors against the max-norm of the state instead of per
    /// component. Right for linear systems whose components share one
    /// amplitude but cross zero individually.
    max_norm: bool,
    k1: [f64; N],
    k1_valid: bool,
    pub steps_accepted: u64,
    pub steps_rejected: u64,
}

impl<const N: usize> Stepper<N> {
    pub fn new(t0: f64, y0: [f64; N], h0: f64, rtol: f64, atol: f64) -> Self {
        Stepper {
            t: t0,
            y: y0,
            h: h0.abs().max(1e-300),
            dir: if h0 < 0.0 { -1.0 } else { 1.0 },
            rtol,
            atol: [atol; N],
            max_norm: false,
            k1: [0.0; N],
            k1_valid: false,
            steps_accepted: 0,
            steps_rejected: 0,
        }
    }

    /// Per-component absolute tolerances (for states of mixed magnitude).
    pub fn set_atol(&mut self, atol: [f64; N]) {
        self.atol = atol;
    }

    pub fn set_max_norm_scaling(&mut self, on: bool) {
        self.max_norm = on;
    }

    /// Replace the state (invalidates the FSAL cache).
    pub fn reset_state(&mut self, t: f64, y: [f64; N]) {
        self.t = t;
        self.y = y;
        self.k1_valid = false;
    }

    /// Rescale the state vector (linear systems only); keeps the FSAL cache.
    pub fn rescale(&mut self, factor: f64) {
        for v in self.y.iter_mut() {
            *v *= factor;
        }
        for v in self.k1.iter_mut() {
            *v *= factor;
        }
    }

    /// Current step size suggestion (signed).
    pub fn h(&self) -> f64 {
        self.h * self.dir
    }

    /// Take one accepted step, not moving past `t_limit`.
    ///
    /// Returns the derivative at the new state so callers can interpolate.
    pub fn advance<F>(&mut self, f: &F, t_limit: f64) -> Result<()>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let remaining = (t_limit - self.t) * self.dir;
        if remaining <= 0.0 {
            return Ok(());
        }
        if !self.k1_valid {
            self.k1 = f(self.t, &self.y);
            self.k1_valid = true;
        }
        let mut attempts = 0u32;
        loop {
            attempts += 1;
            if attempts > 10_000 {
                return Err(Error::Integration(format!(
                    "step control failed to find an acceptable step at t = {}",
                    self.t
                )));
            }
            let h = self.h.min(remaining) * self.dir;
            let (y5, k7, err) = self.attempt(f, h);
            if err <= 1.0 {
                self.t += h;
                self.y = y5;
                self.k1 = k7;
                self.steps_accepted += 1;
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                self.h = (self.h.min(remaining) * grow).max(1e-300);
                return Ok(());
            }
            self.steps_rejected += 1;
            self.h = self.h.min(remaining) * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if self.h < 1e-300 || self.t + self.h * self.dir == self.t {
                return Err(Error::Integration(format!(
                    "step size underflow at t = {}",
                    self.t
                )));
            }
        }
    }

    fn attempt<F>(&self, f: &F, h: f64) -> ([f64; N], [f64; N], f64)
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let t = self.t;
        let y = &self.y;
        let mut stage = |coef: &[f64], ks: &[&[f64; N]], c: f64| -> [f64; N] {
            let mut yt = *y;
            for (a, k) in coef.iter().zip(ks.iter()) {
                for i in 0..N {
                    yt[i] += h * a * k[i];
                }
            }
            f(t + c * h, &yt)
        };
        let k1 = self.k1;
        let k2 = stage(&A2, &[&k1], C[1]);
        let k3 = stage(&A3, &[&k1, &k2], C[2]);
        let k4 = stage(&A4, &[&k1, &k2, &k3], C[3]);
        let k5 = stage(&A5, &[&k1, &k2, &k3, &k4], C[4]);
        let k6 = stage(&A6, &[&k1, &k2, &k3, &k4, &k5], C[5]);

        let mut y5 = *y;
        let ks = [&k1, &k2, &k3, &k4, &k5, &k6];
        for (a, k) in A7.iter().zip(ks.iter()) {
            for i in 0..N {
                y5[i] += h * a * k[i];
            }
        }
        let k7 = f(t + h, &y5);

        let all = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
        let norm_old = self.y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let norm_new = y5.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut err_sq = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (w, k) in E.iter().zip(all.iter()) {
                e += w * k[i];
            }
            e *= h;
            let scale = if self.max_norm {
                self.atol[i] + self.rtol * norm_old.max(norm_new)
            } else {
                self.atol[i] + self.rtol * self.y[i].abs().max(y5[i].abs())
            };
            let r = e / scale;
            err_sq += r * r;
        }
        (y5, k7, (err_sq / N as f64).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        // q'' = -q starting at (1, 0): q(2π) = 1.
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let mut s = Stepper::new(0.0, [1.0, 0.0], 1e-3, 1e-12, 1e-14);
        let t_end = 2.0 * std::f64::consts::PI;
        while s.t < t_end {
            s.advance(&f, t_end).unwrap();
        }
        assert!((s.y[0] - 1.0).abs() < 1e-10);
        assert!(s.y[1].abs() < 1e-10);
    }

    #[test]
    fn integrates_backwards() {
        let f = |t: f64, _y: &[f64; 1]| [2.0 * t];
        let mut s = Stepper::new(1.0, [1.0], -1e-2, 1e-12, 1e-14);
        while s.t > -2.0 {
            s.advance(&f, -2.0).unwrap();
        }
        assert!((s.y[0] - 4.0).abs() < 1e-10);
    }
}
