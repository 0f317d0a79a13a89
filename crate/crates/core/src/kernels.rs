//! Fundamental solutions and their exact time-slab integrals.
//!
//! The heat kernel `G(d, s) = (4πνs)^(-n/2) exp(-d²/(4νs)) H(s)` is the
//! free-space fundamental solution of `∂/∂t - νΔ` in `n` space dimensions,
//! with `d = |x - ξ|` and `s = t - τ`. The boundary integral solver only ever
//! needs the 1D kernel and its `x`-derivative integrated over a time slab,
//! and both of those integrals have closed forms in terms of `erfc`, which
//! absorbs the `1/√s` singularity at `s → 0` analytically.
//!
//! The 2D log kernel `(1/2π) ln r` is the fundamental solution of the
//! Laplacian and is used by [`crate::steady_bem`].

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

/// Exponent beyond which `exp(-q)` underflows to zero in `f64`.
const EXP_UNDERFLOW: f64 = 745.0;

/// Argument beyond which `erfc` is below the smallest normal double.
const ERFC_CUTOFF: f64 = 27.0;

/// Diffusion coefficient of the constant-ν heat kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    nu: f64,
}

impl KernelParams {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return domain(format!("diffusion coefficient must be positive and finite, got {nu}"));
        }
        Ok(Self { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// Complementary error function, flushed to zero past argument 27.
pub fn erfc(x: f64) -> f64 {
    if x > ERFC_CUTOFF {
        0.0
    } else {
        libm::erfc(x)
    }
}

fn check_finite(value: f64, what: &str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be finite, got {value}")))
    }
}

/// Heat kernel in `dim` space dimensions.
///
/// `d` is the signed distance in 1D or the Euclidean norm `|x - ξ|` for
/// `dim >= 2`; `s` is the elapsed time `t - τ`. Returns exactly zero for
/// `s <= 0` and when the Gaussian exponent underflows.
pub fn heat_kernel(d: f64, s: f64, p: &KernelParams, dim: usize) -> Result<f64> {
    check_finite(d, "distance")?;
    check_finite(s, "elapsed time")?;
    if !(1..=3).contains(&dim) {
        return domain(format!("space dimension must be 1, 2 or 3, got {dim}"));
    }
    Ok(heat_kernel_nd(d, s, p.nu, dim as i32))
}

/// `x`-derivative of the 1D heat kernel, `-d/(2νs) G(d, s)`.
pub fn heat_kernel_dx(d: f64, s: f64, p: &KernelParams) -> Result<f64> {
    check_finite(d, "distance")?;
    check_finite(s, "elapsed time")?;
    Ok(heat_kernel_dx_1d(d, s, p.nu))
}

/// `∫_{s1}^{s2} G(d, s) ds` for the 1D heat kernel, in closed form.
///
/// Uses the antiderivative `(4πν)^(-1/2) [2√s e^(-a²/s) - 2a√π erfc(a/√s)]`
/// with `a = |d|/(2√ν)`. An empty window (`s1 == s2`) integrates to zero.
pub fn slab_single_layer(d: f64, s1: f64, s2: f64, p: &KernelParams) -> Result<f64> {
    check_slab(d, s1, s2)?;
    Ok(single_layer_1d(d, s1, s2, p.nu))
}

/// `∫_{s1}^{s2} ∂G/∂x (d, s) ds` for the 1D heat kernel, in closed form.
///
/// Equals `-sign(d)/(2ν) [erfc(a/√s2) - erfc(a/√s1)]`. The coincident-point
/// value `d = 0` is exactly zero; the boundary jump is carried by the free
/// term of the representation instead.
pub fn slab_double_layer(d: f64, s1: f64, s2: f64, p: &KernelParams) -> Result<f64> {
    check_slab(d, s1, s2)?;
    Ok(double_layer_1d(d, s1, s2, p.nu))
}

fn check_slab(d: f64, s1: f64, s2: f64) -> Result<()> {
    check_finite(d, "distance")?;
    check_finite(s1, "window start")?;
    check_finite(s2, "window end")?;
    if s1 < 0.0 {
        return domain(format!("elapsed-time window must start at s1 >= 0, got {s1}"));
    }
    if s2 < s1 {
        return domain(format!("elapsed-time window is reversed: [{s1}, {s2}]"));
    }
    Ok(())
}

/// 2D Laplace fundamental solution `(1/2π) ln r`.
pub fn log_kernel(r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return domain(format!("log kernel needs r > 0, got {r}"));
    }
    Ok(r.ln() / (2.0 * PI))
}

/// Normal derivative of the log kernel with respect to the source point,
/// `(1/2π) ((ξ - x)·n_ξ) / |ξ - x|²`.
pub fn log_kernel_dn(x: [f64; 2], xi: [f64; 2], n_xi: [f64; 2]) -> Result<f64> {
    let dx = xi[0] - x[0];
    let dy = xi[1] - x[1];
    let r2 = dx * dx + dy * dy;
    if !(r2.is_finite() && r2 > 0.0) {
        return domain("log kernel normal derivative needs distinct points");
    }
    Ok(log_kernel_dn_unchecked(dx, dy, n_xi))
}

// Unchecked forms used inside the solvers, where arguments are known good.

#[inline]
pub(crate) fn heat_kernel_nd(d: f64, s: f64, nu: f64, dim: i32) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let q = d * d / (4.0 * nu * s);
    if q > EXP_UNDERFLOW {
        return 0.0;
    }
    (4.0 * PI * nu * s).powf(-0.5 * dim as f64) * (-q).exp()
}

#[inline]
pub(crate) fn heat_kernel_1d(d: f64, s: f64, nu: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let q = d * d / (4.0 * nu * s);
    if q > EXP_UNDERFLOW {
        return 0.0;
    }
    (-q).exp() / (4.0 * PI * nu * s).sqrt()
}

#[inline]
pub(crate) fn heat_kernel_dx_1d(d: f64, s: f64, nu: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    -d / (2.0 * nu * s) * heat_kernel_1d(d, s, nu)
}

/// Antiderivative of the single layer in `s`, without the `(4πν)^(-1/2)`.
#[inline]
fn single_layer_primitive(a: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let rs = s.sqrt();
    let z = a / rs;
    if z * z > EXP_UNDERFLOW {
        return 0.0;
    }
    2.0 * rs * (-z * z).exp() - 2.0 * a * PI.sqrt() * erfc(z)
}

#[inline]
pub(crate) fn single_layer_1d(d: f64, s1: f64, s2: f64, nu: f64) -> f64 {
    if s2 <= s1 {
        return 0.0;
    }
    if d == 0.0 {
        return (s2.sqrt() - s1.sqrt()) / (PI * nu).sqrt();
    }
    let a = d.abs() / (2.0 * nu.sqrt());
    (single_layer_primitive(a, s2) - single_layer_primitive(a, s1)) / (4.0 * PI * nu).sqrt()
}

/// `∫ erf(z / sqrt(4νs)) ds` from `0` to `s`.
#[inline]
fn erf_time_primitive(z: f64, s: f64, nu: f64) -> f64 {
    if s <= 0.0 || z == 0.0 {
        return 0.0;
    }
    let a = z.abs() / (2.0 * nu.sqrt());
    z.signum() * (s * libm::erf(a / s.sqrt()) + a / PI.sqrt() * single_layer_primitive(a, s))
}

/// `∫_{s1}^{s2} ∫_{y_lo}^{y_hi} G(x - y, s) dy ds` with `z_lo = x - y_lo`
/// and `z_hi = x - y_hi`.
#[inline]
pub(crate) fn cell_layer_1d(z_lo: f64, z_hi: f64, s1: f64, s2: f64, nu: f64) -> f64 {
    if s2 <= s1 {
        return 0.0;
    }
    let f = |z: f64| erf_time_primitive(z, s2, nu) - erf_time_primitive(z, s1, nu);
    0.5 * (f(z_lo) - f(z_hi))
}

#[inline]
pub(crate) fn double_layer_1d(d: f64, s1: f64, s2: f64, nu: f64) -> f64 {
    if s2 <= s1 || d == 0.0 {
        return 0.0;
    }
    let a = d.abs() / (2.0 * nu.sqrt());
    let z2 = a / s2.sqrt();
    let diff = if s1 <= 0.0 {
        erfc(z2)
    } else {
        let z1 = a / s1.sqrt();
        // erfc(z2) - erfc(z1) == erf(z1) - erf(z2); the erf form keeps
        // precision when both arguments are small.
        if z1 < 0.5 {
            libm::erf(z1) - libm::erf(z2)
        } else {
            erfc(z2) - erfc(z1)
        }
    };
    -d.signum() / (2.0 * nu) * diff
}

#[inline]
pub(crate) fn log_kernel_dn_unchecked(dx: f64, dy: f64, n: [f64; 2]) -> f64 {
    (dx * n[0] + dy * n[1]) / (dx * dx + dy * dy) / (2.0 * PI)
}
