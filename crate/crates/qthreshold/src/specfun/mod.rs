//! Complex special functions backing the analytic Morse solution:
//! Kummer's confluent hypergeometric M(a,b,y), the principal-branch
//! complex log-gamma, and the real digamma function.
//!
//! Everything here is a pure function of its arguments and safe for
//! unrestricted concurrent use.

mod digamma;
mod gamma;
mod kummer;

pub use digamma::digamma;
pub use gamma::log_gamma;
pub use kummer::{kummer_m, kummer_m_scaled, DEFAULT_Y_MAX};

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577215664901532860606512090082;

/// True if `z` sits on a nonpositive integer within `tol` in both components.
pub(crate) fn near_nonpositive_integer(z: num_complex::Complex64, tol: f64) -> bool {
    let r = z.re.round();
    r <= 0.0 && (z.re - r).abs() <= tol && z.im.abs() <= tol
}
