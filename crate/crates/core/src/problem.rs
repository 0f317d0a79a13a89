//! The 1D initial-boundary value problem
//! `C_t = ν C_xx + σ(x, t)` on `(-L, L) × (0, T)`, `C(x, 0) = C0(x)`.
//!
//! Boundary data use the outward-normal convention throughout: at `x = +L`
//! the normal derivative is `C_x`, at `x = -L` it is `-C_x`. Neumann data
//! `f±` therefore satisfy `C_x(±L, t) = ±f±(t)`, and Robin data satisfy
//! `∂C/∂n + a C = b`.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};

/// A function of one variable (space for profiles, time for boundary data).
pub type Func1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// A function of `(x, t)`.
pub type Func2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

pub fn constant(v: f64) -> Func1 {
    Arc::new(move |_| v)
}

pub fn zero() -> Func1 {
    constant(0.0)
}

/// Which kind of boundary condition a problem carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    Dirichlet,
    Neumann,
    Robin,
}

/// Boundary data at `x = -L` (`minus`) and `x = +L` (`plus`), as functions of `t`.
#[derive(Clone)]
pub enum BoundaryCondition {
    /// `C(±L, t) = g±(t)`.
    Dirichlet { minus: Func1, plus: Func1 },
    /// `∂C/∂n(±L, t) = f±(t)`, i.e. `C_x(±L, t) = ±f±(t)`.
    Neumann { minus: Func1, plus: Func1 },
    /// `∂C/∂n + a C = b` at each end.
    Robin { a_minus: Func1, b_minus: Func1, a_plus: Func1, b_plus: Func1 },
}

impl BoundaryCondition {
    pub fn kind(&self) -> BcKind {
        match self {
            BoundaryCondition::Dirichlet { .. } => BcKind::Dirichlet,
            BoundaryCondition::Neumann { .. } => BcKind::Neumann,
            BoundaryCondition::Robin { .. } => BcKind::Robin,
        }
    }

    /// Homogeneous data of the given kind (`a = 0` for Robin).
    pub fn homogeneous(kind: BcKind) -> Self {
        match kind {
            BcKind::Dirichlet => BoundaryCondition::Dirichlet { minus: zero(), plus: zero() },
            BcKind::Neumann => BoundaryCondition::Neumann { minus: zero(), plus: zero() },
            BcKind::Robin => {
                BoundaryCondition::Robin { a_minus: zero(), b_minus: zero(), a_plus: zero(), b_plus: zero() }
            }
        }
    }
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind())
    }
}

/// A full problem instance.
#[derive(Clone)]
pub struct DiffusionProblem {
    nu: f64,
    half_length: f64,
    final_time: f64,
    initial: Func1,
    boundary: BoundaryCondition,
    source: Option<Func2>,
}

impl DiffusionProblem {
    pub fn new(
        nu: f64,
        half_length: f64,
        final_time: f64,
        initial: Func1,
        boundary: BoundaryCondition,
    ) -> Result<Self> {
        for (name, v) in [("nu", nu), ("L", half_length), ("T", final_time)] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(Self { nu, half_length, final_time, initial, boundary, source: None })
    }

    /// Homogeneous Dirichlet problem.
    pub fn dirichlet(nu: f64, half_length: f64, final_time: f64, initial: Func1) -> Result<Self> {
        Self::new(nu, half_length, final_time, initial, BoundaryCondition::homogeneous(BcKind::Dirichlet))
    }

    /// Homogeneous Neumann problem.
    pub fn neumann(nu: f64, half_length: f64, final_time: f64, initial: Func1) -> Result<Self> {
        Self::new(nu, half_length, final_time, initial, BoundaryCondition::homogeneous(BcKind::Neumann))
    }

    pub fn with_boundary(mut self, boundary: BoundaryCondition) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_source(mut self, source: Func2) -> Self {
        self.source = Some(source);
        self
    }

    pub fn with_initial(mut self, initial: Func1) -> Self {
        self.initial = initial;
        self
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn initial(&self) -> &Func1 {
        &self.initial
    }

    pub fn boundary(&self) -> &BoundaryCondition {
        &self.boundary
    }

    pub fn source(&self) -> Option<&Func2> {
        self.source.as_ref()
    }

    pub fn bc_kind(&self) -> BcKind {
        self.boundary.kind()
    }

    pub(crate) fn require(&self, kind: BcKind) -> Result<()> {
        if self.bc_kind() == kind {
            Ok(())
        } else {
            domain(format!("operation needs a {kind:?} problem, got {:?}", self.bc_kind()))
        }
    }

    pub(crate) fn check_x(&self, x: f64) -> Result<()> {
        if x.is_finite() && x.abs() <= self.half_length {
            Ok(())
        } else {
            domain(format!("x = {x} lies outside [-{L}, {L}]", L = self.half_length))
        }
    }
}

impl fmt::Debug for DiffusionProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffusionProblem")
            .field("nu", &self.nu)
            .field("half_length", &self.half_length)
            .field("final_time", &self.final_time)
            .field("boundary", &self.boundary)
            .field("source", &self.source.is_some())
            .finish()
    }
}

/// Gaussian pulse `exp(∓(x/(L/8))²)` used by the reference experiments.
/// `decaying = false` gives the growing variant with a positive exponent.
pub fn pulse(half_length: f64, decaying: bool) -> Func1 {
    let width = half_length / 8.0;
    let sign = if decaying { -1.0 } else { 1.0 };
    Arc::new(move |x: f64| (sign * (x / width).powi(2)).exp())
}

/// Lowest Dirichlet eigenmode `sin(π(x+L)/(2L))`.
pub fn sine_mode(half_length: f64) -> Func1 {
    Arc::new(move |x: f64| (std::f64::consts::PI * (x + half_length) / (2.0 * half_length)).sin())
}

/// Lowest non-constant Neumann eigenmode `cos(π(x+L)/(2L))`.
pub fn cosine_mode(half_length: f64) -> Func1 {
    Arc::new(move |x: f64| (std::f64::consts::PI * (x + half_length) / (2.0 * half_length)).cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(DiffusionProblem::dirichlet(0.0, 1.0, 1.0, zero()).is_err());
        assert!(DiffusionProblem::dirichlet(0.05, -1.0, 1.0, zero()).is_err());
        assert!(DiffusionProblem::neumann(0.05, 1.0, f64::NAN, zero()).is_err());
    }

    #[test]
    fn kind_checks() {
        let p = DiffusionProblem::neumann(0.05, 1.0, 1.0, zero()).unwrap();
        assert!(p.require(BcKind::Neumann).is_ok());
        assert!(p.require(BcKind::Dirichlet).is_err());
        assert!(p.check_x(1.0).is_ok());
        assert!(p.check_x(1.0 + 1e-12).is_err());
    }

    #[test]
    fn pulse_shape() {
        let c0 = pulse(1.0, true);
        assert_eq!(c0(0.0), 1.0);
        assert!((c0(0.125) - (-1.0f64).exp()).abs() < 1e-15);
        assert!(c0(1.0) < 1e-27);
        assert!(pulse(1.0, false)(1.0) > 1e27);
    }
}
