//! Reference solutions for the 1D problem.
//!
//! [`FourierOracle`] evaluates the separation-of-variables solution on the
//! eigenbasis `sin(nπ(x+L)/(2L))` (Dirichlet) or `cos(nπ(x+L)/(2L))`
//! (Neumann), after lifting the boundary data with a linear or quadratic
//! profile. [`fdm_reference`] is an explicit finite-difference march that
//! shares no code path with either the oracle or the integral solver.

mod fdm;
mod fourier;

pub use fdm::fdm_reference;
pub use fourier::{dirichlet_exact, neumann_exact, project_cosine, project_sine, FourierOracle};

/// Default number of modes for oracle evaluation.
pub const DEFAULT_MODES: usize = 128;
