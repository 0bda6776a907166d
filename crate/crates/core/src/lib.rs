//! Spectral toolkit for semiclassical nonlinear Schrödinger dynamics.
//!
//! The crate simulates the semiclassical defocusing NLS
//! `i eps u_t + (eps^2/2) Lap u = V(x) u + eps^{n sigma} |u|^{2 sigma} u`
//! (V = 0 or |x|^2/2) on periodic boxes and provides the analysis layer
//! around it: exact linear propagators, caustic approximants and post-focus
//! profile extraction, a numerical scattering operator, phase-space (Wigner)
//! diagnostics, the admissible-exponent algebra of the underlying dispersive
//! estimates, and a batch harness that runs whole epsilon sweeps and writes
//! machine-checkable reports.

pub mod data;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod exponents;
pub mod fft;
pub mod field;
pub mod grid;
pub mod params;
pub mod plots;
pub mod propagators;
pub mod report;
pub mod scattering;
pub mod scenario;
pub mod snapshot;
pub mod solver;
pub mod wigner;

pub use error::{Error, Result};
pub use field::{Field, Space};
pub use grid::Grid;
pub use params::{Params, Potential};
