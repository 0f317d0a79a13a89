use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::problem::{BcKind, BoundaryCondition, DiffusionProblem, Func1};
use crate::quadrature::GaussLegendre;

const PROJECTION_ORDER: usize = 8;
/// Composite panels per half-wavelength of the highest projected mode.
const PANELS_PER_HALF_WAVE: usize = 8;
const MIN_PANELS: usize = 64;
/// Upper bound on the convolution sub-grid step.
const MAX_CONVOLUTION_STEP: f64 = 1e-3;

/// `nπ/(2L)`.
fn wavenumber(n: usize, half_length: f64) -> f64 {
    n as f64 * PI / (2.0 * half_length)
}

/// Samples `f` once on a composite Gauss-Legendre grid fine enough for
/// modes up to `max_mode`, then returns `(phase, weighted sample)` pairs
/// with `phase = π(x+L)/(2L)`.
fn projection_samples(f: &dyn Fn(f64) -> f64, max_mode: usize, half_length: f64) -> Result<Vec<(f64, f64)>> {
    let panels = (PANELS_PER_HALF_WAVE * max_mode).max(MIN_PANELS);
    let (xs, ws) = GaussLegendre::new(PROJECTION_ORDER)?.composite(-half_length, half_length, panels);
    xs.into_iter()
        .zip(ws)
        .map(|(x, w)| {
            let v = f(x);
            if !v.is_finite() {
                return domain(format!("profile is not finite at x = {x}"));
            }
            Ok((PI * (x + half_length) / (2.0 * half_length), w * v))
        })
        .collect()
}

/// Sine coefficients `c_m = (1/L) ∫ f(x) sin(mπ(x+L)/(2L)) dx`, `m = 1..=modes`.
pub fn project_sine(f: &dyn Fn(f64) -> f64, modes: usize, half_length: f64) -> Result<Vec<f64>> {
    if modes < 1 {
        return domain("sine projection needs at least one mode");
    }
    if !(half_length.is_finite() && half_length > 0.0) {
        return domain(format!("L must be positive, got {half_length}"));
    }
    let samples = projection_samples(f, modes, half_length)?;
    Ok((1..=modes)
        .map(|m| samples.iter().map(|&(phase, wf)| wf * (m as f64 * phase).sin()).sum::<f64>() / half_length)
        .collect())
}

/// Cosine coefficients `c'_m = (1/(L ε_m)) ∫ f(x) cos(mπ(x+L)/(2L)) dx`,
/// `m = 0..=modes`, with `ε_0 = 2` and `ε_m = 1` otherwise.
pub fn project_cosine(f: &dyn Fn(f64) -> f64, modes: usize, half_length: f64) -> Result<Vec<f64>> {
    if !(half_length.is_finite() && half_length > 0.0) {
        return domain(format!("L must be positive, got {half_length}"));
    }
    let samples = projection_samples(f, modes.max(1), half_length)?;
    Ok((0..=modes)
        .map(|m| {
            let eps = if m == 0 { 2.0 } else { 1.0 };
            samples.iter().map(|&(phase, wf)| wf * (m as f64 * phase).cos()).sum::<f64>() / (half_length * eps)
        })
        .collect())
}

#[derive(Clone)]
enum Family {
    /// Sine modes `n = 1..=N`; lift `(g-(L-x) + g+(L+x))/(2L)`.
    Sine { g_minus: Func1, g_plus: Func1 },
    /// Cosine modes `n = 0..=N`; lift `(f-(L-x)² + f+(L+x)²)/(4L)`.
    Cosine { f_minus: Func1, f_plus: Func1 },
}

/// Spectral exact solution of a source-free Dirichlet or Neumann problem.
#[derive(Clone)]
pub struct FourierOracle {
    nu: f64,
    half_length: f64,
    final_time: f64,
    family: Family,
    /// Initial-profile coefficients `c_n` (sine) or `c'_n` (cosine).
    coefficients: Vec<f64>,
    /// Expansion coefficients of the `-L` lift profile, `L - x` or `(L - x)²`.
    lift_minus: Vec<f64>,
    /// Expansion coefficients of the `+L` lift profile, `L + x` or `(L + x)²`.
    lift_plus: Vec<f64>,
}

impl FourierOracle {
    /// Builds the oracle with `modes` modes (`N`); Dirichlet uses `n = 1..=N`,
    /// Neumann `n = 0..=N`.
    pub fn new(problem: &DiffusionProblem, modes: usize) -> Result<Self> {
        if problem.source().is_some() {
            return domain("the spectral oracle covers source-free problems only");
        }
        if modes < 1 {
            return domain("the spectral oracle needs at least one mode");
        }
        let l = problem.half_length();
        let c0 = problem.initial().clone();
        let (family, coefficients, lift_minus, lift_plus) = match problem.boundary() {
            BoundaryCondition::Dirichlet { minus, plus } => (
                Family::Sine { g_minus: minus.clone(), g_plus: plus.clone() },
                project_sine(&*c0, modes, l)?,
                project_sine(&|x| l - x, modes, l)?,
                project_sine(&|x| l + x, modes, l)?,
            ),
            BoundaryCondition::Neumann { minus, plus } => (
                Family::Cosine { f_minus: minus.clone(), f_plus: plus.clone() },
                project_cosine(&*c0, modes, l)?,
                project_cosine(&|x| (l - x).powi(2), modes, l)?,
                project_cosine(&|x| (l + x).powi(2), modes, l)?,
            ),
            BoundaryCondition::Robin { .. } => {
                return domain("the spectral oracle covers Dirichlet and Neumann problems only")
            }
        };
        Ok(Self { nu: problem.nu(), half_length: l, final_time: problem.final_time(), family, coefficients, lift_minus, lift_plus })
    }

    pub fn kind(&self) -> BcKind {
        match self.family {
            Family::Sine { .. } => BcKind::Dirichlet,
            Family::Cosine { .. } => BcKind::Neumann,
        }
    }

    /// Index of the first mode: 1 for sine, 0 for cosine.
    pub fn first_mode(&self) -> usize {
        match self.family {
            Family::Sine { .. } => 1,
            Family::Cosine { .. } => 0,
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Lift-profile coefficients `(a⁻, a⁺)` or `(b⁻, b⁺)`.
    pub fn lift_coefficients(&self) -> (&[f64], &[f64]) {
        (&self.lift_minus, &self.lift_plus)
    }

    /// `G_n(t) = exp(-ν (nπ/2L)² t) H(t)`.
    pub fn mode_decay(&self, n: usize, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        (-self.nu * wavenumber(n, self.half_length).powi(2) * t).exp()
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if t.is_finite() && (0.0..=self.final_time * (1.0 + 1e-12)).contains(&t) {
            Ok(())
        } else {
            domain(format!("t = {t} lies outside [0, {}]", self.final_time))
        }
    }

    /// Modal amplitudes `A_n(t)` or `B_n(t)` in the order of [`Self::coefficients`].
    ///
    /// The boundary-data convolution uses secant slopes of the data on a
    /// uniform sub-grid of step at most `min(t/10, 1e-3)`, integrated against
    /// each mode's exponential exactly.
    pub fn amplitudes(&self, t: f64) -> Result<Vec<f64>> {
        self.check_t(t)?;
        let l = self.half_length;
        let (lift_scale, d_minus, d_plus) = match &self.family {
            Family::Sine { g_minus, g_plus } => (1.0 / (2.0 * l), g_minus, g_plus),
            Family::Cosine { f_minus, f_plus } => (1.0 / (4.0 * l), f_minus, f_plus),
        };
        let (m0, p0) = (d_minus(0.0), d_plus(0.0));

        let steps = if t > 0.0 { (t / (t / 10.0).min(MAX_CONVOLUTION_STEP)).ceil() as usize } else { 0 };
        let h = if steps > 0 { t / steps as f64 } else { 0.0 };
        let grid: Vec<(f64, f64)> = (0..=steps).map(|i| {
            let tau = i as f64 * h;
            (d_minus(tau), d_plus(tau))
        }).collect();

        let first = self.first_mode();
        let mut out = Vec::with_capacity(self.coefficients.len());
        for (idx, &c) in self.coefficients.iter().enumerate() {
            let n = first + idx;
            let lambda = self.nu * wavenumber(n, l).powi(2);
            let (am, ap) = (self.lift_minus[idx], self.lift_plus[idx]);
            let start = c - lift_scale * (m0 * am + p0 * ap);
            // ∫_0^t G_n(t-τ) d'(τ) dτ with piecewise-constant d'
            let mut conv_m = 0.0;
            let mut conv_p = 0.0;
            for i in 0..steps {
                let w = if lambda == 0.0 {
                    h
                } else {
                    let tail = t - (i + 1) as f64 * h;
                    (-lambda * tail).exp() * -(-lambda * h).exp_m1() / lambda
                };
                conv_m += w * (grid[i + 1].0 - grid[i].0) / h;
                conv_p += w * (grid[i + 1].1 - grid[i].1) / h;
            }
            let mut amp = start * self.mode_decay(n, t) - lift_scale * (am * conv_m + ap * conv_p);
            if n == 0 {
                // the quadratic lift has curvature; ν(f- + f+)/(2L) feeds the mean
                let mut integral = 0.0;
                for i in 0..steps {
                    integral += 0.5 * h * (grid[i].0 + grid[i].1 + grid[i + 1].0 + grid[i + 1].1);
                }
                amp += self.nu / (2.0 * l) * integral;
            }
            out.push(amp);
        }
        Ok(out)
    }

    /// Evaluates the solution at `x` from precomputed amplitudes at time `t`.
    pub fn eval_with(&self, amplitudes: &[f64], x: f64, t: f64) -> Result<f64> {
        let l = self.half_length;
        if !(x.is_finite() && x.abs() <= l) {
            return domain(format!("x = {x} lies outside [-{l}, {l}]"));
        }
        let phase = PI * (x + l) / (2.0 * l);
        let first = self.first_mode();
        Ok(match &self.family {
            Family::Sine { g_minus, g_plus } => {
                let lift = (g_minus(t) * (l - x) + g_plus(t) * (l + x)) / (2.0 * l);
                lift + amplitudes.iter().enumerate().map(|(i, a)| a * ((first + i) as f64 * phase).sin()).sum::<f64>()
            }
            Family::Cosine { f_minus, f_plus } => {
                let lift = (f_minus(t) * (l - x).powi(2) + f_plus(t) * (l + x).powi(2)) / (4.0 * l);
                lift + amplitudes.iter().enumerate().map(|(i, b)| b * ((first + i) as f64 * phase).cos()).sum::<f64>()
            }
        })
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        let amps = self.amplitudes(t)?;
        self.eval_with(&amps, x, t)
    }

    /// Evaluates at every point of `xs` at one time.
    pub fn eval_many(&self, xs: &[f64], t: f64) -> Result<Vec<f64>> {
        let amps = self.amplitudes(t)?;
        xs.iter().map(|&x| self.eval_with(&amps, x, t)).collect()
    }
}

/// Exact Dirichlet solution at `(x, t)` with `modes` sine modes.
pub fn dirichlet_exact(problem: &DiffusionProblem, modes: usize, x: f64, t: f64) -> Result<f64> {
    problem.require(BcKind::Dirichlet)?;
    problem.check_x(x)?;
    FourierOracle::new(problem, modes)?.eval(x, t)
}

/// Exact Neumann solution at `(x, t)` with cosine modes `0..=modes`.
pub fn neumann_exact(problem: &DiffusionProblem, modes: usize, x: f64, t: f64) -> Result<f64> {
    problem.require(BcKind::Neumann)?;
    problem.check_x(x)?;
    FourierOracle::new(problem, modes)?.eval(x, t)
}
