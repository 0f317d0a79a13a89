//! Space-time boundary integral solvers for diffusion.
//!
//! The unsteady 1D problem `C_t = ν C_xx + σ` on `(-L, L)` is solved by
//! marching the boundary unknowns of a Volterra integral equation built on
//! the heat kernel, then reconstructing interior values from layer
//! potentials ([`stum`]). Results are checked against Fourier-series exact
//! solutions and an explicit finite-difference reference ([`oracle`]).
//! A steady 2D Laplace/Poisson boundary element solver lives in
//! [`steady_bem`].

pub mod cli;
pub mod error;
pub mod kernels;
mod linalg;
pub mod oracle;
pub mod problem;
pub mod quadrature;
pub mod steady_bem;
pub mod stum;

pub use error::{Error, Result};
pub use problem::{BoundaryCondition, DiffusionProblem};
