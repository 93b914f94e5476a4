//! One-dimensional quantum threshold reflection toolkit.
//!
//! The crate reproduces, at desk scale, the full computational chain for
//! threshold scattering studies on the half line:
//!
//! - [`specfun`]: Kummer's confluent hypergeometric function, complex
//!   log-gamma and digamma — the special functions behind the analytic
//!   Morse scattering states.
//! - [`morse`]: exact Morse-potential scattering — reflection amplitude,
//!   turning points, badlands (quantality) diagnostics, threshold slope
//!   and stationary wavefunctions.
//! - [`senn`]: the general-potential threshold-reflection construction —
//!   fundamental solutions, reflection/transmission amplitudes for
//!   two-sided and wall topologies, zero-energy-resonance diagnostics.
//! - [`qdyn`]: time-domain quantum engine — coherent-state overlaps,
//!   wavepacket propagation by quadrature over the exact scattering
//!   states, space–time density grids, arrival correlation functions and
//!   mean flight times.
//! - [`cwigner`]: classical Wigner engine — phase-space sampling,
//!   trajectory dynamics with free-flight segmentation, histogrammed
//!   densities and Monte Carlo flight-time statistics.
//! - [`experiments`]: canned reproduction presets binding everything into
//!   reference figures and the flight-time table.
//!
//! Data-parallel loops run on rayon by default; building with
//! `--no-default-features` selects a sequential fallback that produces
//! bit-identical results.

pub mod cwigner;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod morse;
pub mod qdyn;
pub mod senn;
pub mod specfun;

pub(crate) mod par;
pub(crate) mod phase;
pub(crate) mod rk;

pub use error::{Error, Result};
pub use grid::{DensityProvenance, SpaceTimeDensity};
pub use morse::{MorseParams, ReflectionValue};
pub use qdyn::{CoherentState, KGrid};
pub use senn::{BoundaryData, PotentialModel, Topology};
