//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the numerical kernels.
///
/// Validation problems (bad arguments, malformed configuration) are kept
/// separate from numerical failures (lost convergence, overflow, drift)
/// so that callers can map them onto distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the function's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A result exceeded the representable range and no scaled variant was requested.
    #[error("overflow: {0}")]
    Overflow(String),

    /// An iteration or series failed to converge within its budget.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Evaluation at (or numerically indistinguishable from) a pole.
    #[error("pole: {0}")]
    Pole(String),

    /// ODE step control failed.
    #[error("integration failure: {0}")]
    Integration(String),

    /// The potential exceeded the solver's configured magnitude bound.
    #[error("stiffness: {0}")]
    Stiffness(String),

    /// A linear system or amplitude denominator degenerated.
    #[error("degenerate system: {0}")]
    Degenerate(String),

    /// The decaying interior solution could not be isolated (wall too soft).
    #[error("decay selection failed: {0}")]
    DecaySelection(String),

    /// A wavepacket violates the asymptotic-localization precondition.
    #[error("asymptotics violation: {0}")]
    Asymptotics(String),

    /// A time window could not be extended to cover the arrival decay.
    #[error("window error: {0}")]
    Window(String),

    /// Trajectory energy drift exceeded the configured gate.
    #[error("energy drift: {0}")]
    EnergyDrift(String),

    /// Too many trajectories never crossed the arrival plane.
    #[error("no crossing: {0}")]
    NoCrossing(String),

    /// Malformed configuration or input file.
    #[error("config error: {0}")]
    Config(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True if the error is a validation problem rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Config(_))
    }
}
