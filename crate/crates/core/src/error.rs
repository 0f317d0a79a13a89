use thiserror::Error;

/// Errors raised by the kernels, quadrature, solvers and oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An integrand or input produced a non-finite value.
    #[error("non-finite value {value} at {at}")]
    NonFinite { value: f64, at: f64 },

    /// Adaptive quadrature hit its bisection depth limit.
    #[error("adaptive quadrature did not converge (depth limit {depth} reached near x = {at})")]
    Convergence { depth: usize, at: f64 },

    /// The 2x2 Volterra system of a marching step is numerically singular.
    #[error("ill-conditioned boundary system at step {step} (|det| = {det:e})")]
    IllConditioned { step: usize, det: f64 },

    /// A dense system could not be solved by elimination.
    #[error("singular linear system (pivot-ratio condition estimate {condition:e})")]
    Singular { condition: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
