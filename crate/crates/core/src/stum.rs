//! Space-time boundary integral solver for the 1D problem.
//!
//! With the heat kernel `G(d, s)` and slab integrals `SL`, `DL` from
//! [`crate::kernels`], the field satisfies
//!
//! ```text
//! ε C(x,t) = I0(x,t) + S(x,t)
//!          - ν Σ_j [ q⁻_j SL(x+L) + C⁻_j DL(x+L) - q⁺_j SL(x-L) - C⁺_j DL(x-L) ]
//! ```
//!
//! where `q = C_x` and `C` are the boundary flux and trace on slab
//! `(t_{j-1}, t_j]`, `I0` is the initial layer, `S` the source layer and
//! `ε = 1/2` at `x = ±L`, `1` inside. Collocating at `x = ±L`, `t = t_k`
//! gives a lower-triangular (Volterra) system solved one 2x2 block per step:
//! for the fluxes under Dirichlet data, for the traces under Neumann or
//! Robin data.

use crate::error::{domain, Error, Result};
use crate::kernels::{cell_layer_1d, double_layer_1d, heat_kernel_1d, single_layer_1d};
use crate::linalg::solve_2x2;
use crate::problem::{BcKind, BoundaryCondition, DiffusionProblem};

/// Relative tolerance for snapping a time onto the slab grid.
const SNAP: f64 = 1e-9;

/// Uniform time slabs `t_k = k dt`, `k = 1..=K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return domain(format!("dt must be positive and finite, got {dt}"));
        }
        if steps < 1 {
            return domain("time grid needs at least one step");
        }
        Ok(Self { dt, steps })
    }

    /// The largest grid with `K dt <= T` (`T / dt` within `1e-9` of an
    /// integer counts as that integer).
    pub fn covering(dt: f64, final_time: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return domain(format!("dt must be positive and finite, got {dt}"));
        }
        let ratio = final_time / dt;
        let steps = if (ratio - ratio.round()).abs() < SNAP { ratio.round() } else { ratio.floor() };
        Self::new(dt, steps as usize)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn end(&self) -> f64 {
        self.time(self.steps)
    }

    /// Midpoint of slab `k` (1-based).
    pub fn slab_mid(&self, k: usize) -> f64 {
        (k as f64 - 0.5) * self.dt
    }

    fn check_against(&self, p: &DiffusionProblem) -> Result<()> {
        let t = p.final_time();
        if self.end() > t + 1e-12 * t.max(1.0) {
            return domain(format!("K dt = {} exceeds T = {t}", self.end()));
        }
        Ok(())
    }
}

/// `M` uniform cells over `[-L, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceGrid {
    half_length: f64,
    cells: usize,
}

impl SpaceGrid {
    pub fn new(half_length: f64, cells: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return domain(format!("L must be positive and finite, got {half_length}"));
        }
        if cells < 2 {
            return domain(format!("space grid needs at least 2 cells, got {cells}"));
        }
        Ok(Self { half_length, cells })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.cells as f64
    }

    pub fn midpoint(&self, m: usize) -> f64 {
        -self.half_length + (m as f64 + 0.5) * self.dx()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        (0..self.cells).map(|m| self.midpoint(m)).collect()
    }

    fn check_against(&self, p: &DiffusionProblem) -> Result<()> {
        if (self.half_length - p.half_length()).abs() > 1e-12 * p.half_length() {
            return domain(format!("space grid L = {} differs from problem L = {}", self.half_length, p.half_length()));
        }
        Ok(())
    }
}

/// Snapshots of a field on a fixed set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    kind: BcKind,
    xs: Vec<f64>,
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl FieldGrid {
    /// `values[j][m]` is the field at `xs[m]`, `times[j]`.
    pub fn new(kind: BcKind, xs: Vec<f64>, times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != times.len() || values.iter().any(|row| row.len() != xs.len()) {
            return domain("field values do not match the grid dimensions");
        }
        for (row, &t) in values.iter().zip(&times) {
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::NonFinite { value: *v, at: t });
            }
        }
        Ok(Self { kind, xs, times, values })
    }

    pub fn kind(&self) -> BcKind {
        self.kind
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn snapshot(&self, j: usize) -> &[f64] {
        &self.values[j]
    }
}

/// What the marched unknown is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    /// `C_x(±L)`, solved for under Dirichlet data.
    Flux,
    /// `C(±L)`, solved for under Neumann or Robin data.
    Trace,
}

/// Flux and trace at both ends on one slab.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlabDensities {
    pub flux_minus: f64,
    pub trace_minus: f64,
    pub flux_plus: f64,
    pub trace_plus: f64,
}

/// Piecewise-constant boundary densities, one slab per completed step.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryHistory {
    kind: DensityKind,
    dt: f64,
    slabs: Vec<SlabDensities>,
}

impl BoundaryHistory {
    fn new(kind: DensityKind, dt: f64, capacity: usize) -> Self {
        Self { kind, dt, slabs: Vec::with_capacity(capacity) }
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.slabs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slabs.is_empty()
    }

    /// The marched unknowns `(v⁻_k, v⁺_k)` of slab `k` (1-based).
    pub fn unknowns(&self, k: usize) -> [f64; 2] {
        let s = &self.slabs[k - 1];
        match self.kind {
            DensityKind::Flux => [s.flux_minus, s.flux_plus],
            DensityKind::Trace => [s.trace_minus, s.trace_plus],
        }
    }

    /// Both densities of slab `k` (1-based).
    pub fn slab(&self, k: usize) -> &SlabDensities {
        &self.slabs[k - 1]
    }

    pub fn slabs(&self) -> &[SlabDensities] {
        &self.slabs
    }
}

/// Slab integrals for the two boundary distances `0` and `2L` with
/// `s1 = m dt`, `s2 = (m+1) dt`.
struct SlabTables {
    sl_near: Vec<f64>,
    sl_far: Vec<f64>,
    /// Double layer at `d = +2L`; odd in `d`, zero at `d = 0`.
    dl_far: Vec<f64>,
}

impl SlabTables {
    fn new(nu: f64, l: f64, dt: f64, steps: usize) -> Self {
        let s = |m: usize| (m as f64 * dt, (m + 1) as f64 * dt);
        Self {
            sl_near: (0..steps).map(|m| { let (a, b) = s(m); single_layer_1d(0.0, a, b, nu) }).collect(),
            sl_far: (0..steps).map(|m| { let (a, b) = s(m); single_layer_1d(2.0 * l, a, b, nu) }).collect(),
            dl_far: (0..steps).map(|m| { let (a, b) = s(m); double_layer_1d(2.0 * l, a, b, nu) }).collect(),
        }
    }

    /// `(SL(x+L), DL(x+L), SL(x-L), DL(x-L))` for collocation row `r`
    /// (`0` at `-L`, `1` at `+L`) and lag `m = k - j`.
    #[inline]
    fn row(&self, r: usize, m: usize) -> (f64, f64, f64, f64) {
        if r == 0 {
            (self.sl_near[m], 0.0, self.sl_far[m], -self.dl_far[m])
        } else {
            (self.sl_far[m], self.dl_far[m], self.sl_near[m], 0.0)
        }
    }
}

/// The solver for one problem on fixed grids. Caches the initial-profile
/// samples; every marching or reconstruction call reuses them.
pub struct StumSolver<'a> {
    problem: &'a DiffusionProblem,
    space: SpaceGrid,
    time: TimeGrid,
    xm: Vec<f64>,
    c0: Vec<f64>,
}

impl<'a> StumSolver<'a> {
    pub fn new(problem: &'a DiffusionProblem, space: SpaceGrid, time: TimeGrid) -> Result<Self> {
        space.check_against(problem)?;
        time.check_against(problem)?;
        let xm = space.midpoints();
        let c0: Vec<f64> = xm.iter().map(|&x| (problem.initial())(x)).collect();
        if let Some((&x, &v)) = xm.iter().zip(&c0).find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { value: v, at: x });
        }
        Ok(Self { problem, space, time, xm, c0 })
    }

    pub fn problem(&self) -> &DiffusionProblem {
        self.problem
    }

    pub fn space(&self) -> SpaceGrid {
        self.space
    }

    pub fn time(&self) -> TimeGrid {
        self.time
    }

    /// `Σ_m C0(x_m) G(x - x_m, t) dx`.
    pub fn initial_layer(&self, x: f64, t: f64) -> Result<f64> {
        if !(t.is_finite() && t > 0.0) {
            return domain(format!("initial layer needs t > 0, got {t}"));
        }
        let nu = self.problem.nu();
        let sum: f64 = self.xm.iter().zip(&self.c0).map(|(&xm, &c)| c * heat_kernel_1d(x - xm, t, nu)).sum();
        Ok(sum * self.space.dx())
    }

    /// Source layer with `σ` held constant on each cell and slab (sampled at
    /// the cell midpoint and the slab midpoint, the final slab capped at
    /// `t`) and the kernel integrated exactly over each cell-slab block.
    pub fn source_layer(&self, x: f64, t: f64) -> Result<f64> {
        if !(t.is_finite() && t > 0.0) {
            return domain(format!("source layer needs t > 0, got {t}"));
        }
        let Some(sigma) = self.problem.source() else { return Ok(0.0) };
        let nu = self.problem.nu();
        let dt = self.time.dt;
        let slabs = slab_count(t, dt);
        let mut total = 0.0;
        for j in 1..=slabs {
            let start = (j - 1) as f64 * dt;
            let end = (j as f64 * dt).min(t);
            if end <= start {
                continue;
            }
            let tau = 0.5 * (start + end);
            let (s1, s2) = (t - end, t - start);
            let half = 0.5 * self.space.dx();
            for &xm in &self.xm {
                total += sigma(xm, tau) * cell_layer_1d(x - xm + half, x - xm - half, s1, s2, nu);
            }
        }
        Ok(total)
    }

    /// Marches the boundary unknowns over all `K` steps.
    pub fn march(&self) -> Result<BoundaryHistory> {
        match self.problem.boundary() {
            BoundaryCondition::Dirichlet { .. } => self.march_flux(),
            _ => self.march_trace(),
        }
    }

    /// `I0 + S` at both ends at `t_k`, from the cached tables.
    fn volume_terms(&self, k: usize, source: Option<&SourceTable>) -> Result<[f64; 2]> {
        let l = self.space.half_length;
        let t = self.time.time(k);
        let mut out = [self.initial_layer(-l, t)?, self.initial_layer(l, t)?];
        if let Some(src) = source {
            let s = src.at_step(k);
            out[0] += s[0];
            out[1] += s[1];
        }
        Ok(out)
    }

    /// `ν Σ_{j<k} [q⁻ SL(x+L) + C⁻ DL(x+L) - q⁺ SL(x-L) - C⁺ DL(x-L)]` per row.
    fn history_sum(&self, hist: &BoundaryHistory, tables: &SlabTables, k: usize) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, s) in hist.slabs.iter().enumerate().take(k - 1) {
                let (slp, dlp, slm, dlm) = tables.row(r, k - 1 - j);
                acc += s.flux_minus * slp + s.trace_minus * dlp - s.flux_plus * slm - s.trace_plus * dlm;
            }
            *o = self.problem.nu() * acc;
        }
        out
    }

    fn march_flux(&self) -> Result<BoundaryHistory> {
        let BoundaryCondition::Dirichlet { minus, plus } = self.problem.boundary() else {
            return domain("flux marching needs Dirichlet data");
        };
        let nu = self.problem.nu();
        let (l, dt, steps) = (self.space.half_length, self.time.dt, self.time.steps);
        let tables = SlabTables::new(nu, l, dt, steps);
        let source = self.source_table()?;
        let mut hist = BoundaryHistory::new(DensityKind::Flux, dt, steps);
        for k in 1..=steps {
            let tk = self.time.time(k);
            let mid = self.time.slab_mid(k);
            let (cm, cp) = (minus(mid), plus(mid));
            let edge = [minus(tk), plus(tk)];
            let vol = self.volume_terms(k, source.as_ref())?;
            let past = self.history_sum(&hist, &tables, k);
            let mut m = [[0.0; 2]; 2];
            let mut rhs = [0.0; 2];
            for r in 0..2 {
                let (slp, dlp, slm, dlm) = tables.row(r, 0);
                m[r] = [nu * slp, -nu * slm];
                rhs[r] = -0.5 * edge[r] + vol[r] - past[r] - nu * (cm * dlp - cp * dlm);
            }
            let v = solve_2x2(m, rhs).map_err(|det| Error::IllConditioned { step: k, det })?;
            check_finite(&v, tk)?;
            hist.slabs.push(SlabDensities { flux_minus: v[0], trace_minus: cm, flux_plus: v[1], trace_plus: cp });
        }
        Ok(hist)
    }

    fn march_trace(&self) -> Result<BoundaryHistory> {
        let nu = self.problem.nu();
        let (l, dt, steps) = (self.space.half_length, self.time.dt, self.time.steps);
        let tables = SlabTables::new(nu, l, dt, steps);
        let source = self.source_table()?;
        let mut hist = BoundaryHistory::new(DensityKind::Trace, dt, steps);
        for k in 1..=steps {
            let tk = self.time.time(k);
            let [(am, bm), (ap, bp)] = flux_coefficients(self.problem.boundary(), self.time.slab_mid(k))?;
            let vol = self.volume_terms(k, source.as_ref())?;
            let past = self.history_sum(&hist, &tables, k);
            let mut m = [[0.0; 2]; 2];
            let mut rhs = [0.0; 2];
            for r in 0..2 {
                let (slp, dlp, slm, dlm) = tables.row(r, 0);
                m[r] = [nu * (am * slp + dlp), -nu * (ap * slm + dlm)];
                m[r][r] += 0.5;
                rhs[r] = vol[r] - past[r] - nu * (bm * slp - bp * slm);
            }
            let c = solve_2x2(m, rhs).map_err(|det| Error::IllConditioned { step: k, det })?;
            check_finite(&c, tk)?;
            hist.slabs.push(SlabDensities {
                flux_minus: am * c[0] + bm,
                trace_minus: c[0],
                flux_plus: ap * c[1] + bp,
                trace_plus: c[1],
            });
        }
        Ok(hist)
    }

    fn source_table(&self) -> Result<Option<SourceTable>> {
        let Some(sigma) = self.problem.source() else { return Ok(None) };
        let (nu, l, dt, steps) = (self.problem.nu(), self.space.half_length, self.time.dt, self.time.steps);
        let cells = self.xm.len();
        let half = 0.5 * self.space.dx();
        // kernel[r][m][lag]
        let mut kernel = vec![vec![vec![0.0; steps]; cells]; 2];
        for (r, x) in [-l, l].into_iter().enumerate() {
            for (m, &xm) in self.xm.iter().enumerate() {
                for lag in 0..steps {
                    let (s1, s2) = (lag as f64 * dt, (lag + 1) as f64 * dt);
                    kernel[r][m][lag] = cell_layer_1d(x - xm + half, x - xm - half, s1, s2, nu);
                }
            }
        }
        let mut samples = vec![vec![0.0; steps]; cells];
        for (m, &xm) in self.xm.iter().enumerate() {
            for j in 0..steps {
                let v = sigma(xm, self.time.slab_mid(j + 1));
                if !v.is_finite() {
                    return Err(Error::NonFinite { value: v, at: xm });
                }
                samples[m][j] = v;
            }
        }
        Ok(Some(SourceTable { kernel, samples }))
    }

    /// Evaluates the representation at `(x, t)` from a marched history.
    pub fn reconstruct(&self, hist: &BoundaryHistory, x: f64, t: f64) -> Result<f64> {
        self.problem.check_x(x)?;
        if !(t.is_finite() && t > 0.0) {
            return domain(format!("reconstruction needs t > 0, got {t}"));
        }
        let dt = hist.dt;
        let slabs = slab_count(t, dt);
        if slabs > hist.len() {
            return domain(format!("t = {t} lies beyond the marched history (t_K = {})", hist.len() as f64 * dt));
        }
        let l = self.space.half_length;
        let nu = self.problem.nu();
        let (dp, dm) = (x + l, x - l);
        let mut acc = 0.0;
        for (j, s) in hist.slabs.iter().enumerate().take(slabs) {
            let s1 = (t - (j + 1) as f64 * dt).max(0.0);
            let s2 = t - j as f64 * dt;
            acc += s.flux_minus * single_layer_1d(dp, s1, s2, nu) + s.trace_minus * double_layer_1d(dp, s1, s2, nu)
                - s.flux_plus * single_layer_1d(dm, s1, s2, nu)
                - s.trace_plus * double_layer_1d(dm, s1, s2, nu);
        }
        let value = self.initial_layer(x, t)? + self.source_layer(x, t)? - nu * acc;
        let eps = if x.abs() == l { 0.5 } else { 1.0 };
        let c = value / eps;
        if !c.is_finite() {
            return Err(Error::NonFinite { value: c, at: x });
        }
        Ok(c)
    }

    /// Reconstructs on the cell midpoints at each of `times`.
    pub fn field(&self, hist: &BoundaryHistory, times: &[f64]) -> Result<FieldGrid> {
        let values = times
            .iter()
            .map(|&t| self.xm.iter().map(|&x| self.reconstruct(hist, x, t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        FieldGrid::new(self.problem.bc_kind(), self.xm.clone(), times.to_vec(), values)
    }
}

struct SourceTable {
    kernel: Vec<Vec<Vec<f64>>>,
    samples: Vec<Vec<f64>>,
}

impl SourceTable {
    fn at_step(&self, k: usize) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (kern, samp) in self.kernel[r].iter().zip(&self.samples) {
                for j in 0..k {
                    acc += samp[j] * kern[k - 1 - j];
                }
            }
            *o = acc;
        }
        out
    }
}

/// Slabs touched by `(0, t]`, snapping `t` onto the grid.
fn slab_count(t: f64, dt: f64) -> usize {
    let ratio = t / dt;
    if (ratio - ratio.round()).abs() < SNAP {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    }
}

/// `C_x = α C + β` at each end, evaluated at `t`.
fn flux_coefficients(bc: &BoundaryCondition, t: f64) -> Result<[(f64, f64); 2]> {
    let out = match bc {
        BoundaryCondition::Neumann { minus, plus } => [(0.0, -minus(t)), (0.0, plus(t))],
        BoundaryCondition::Robin { a_minus, b_minus, a_plus, b_plus } => {
            [(a_minus(t), -b_minus(t)), (-a_plus(t), b_plus(t))]
        }
        BoundaryCondition::Dirichlet { .. } => return domain("trace marching needs Neumann or Robin data"),
    };
    if out.iter().any(|(a, b)| !(a.is_finite() && b.is_finite())) {
        return Err(Error::NonFinite { value: f64::NAN, at: t });
    }
    Ok(out)
}

fn check_finite(v: &[f64; 2], t: f64) -> Result<()> {
    match v.iter().find(|x| !x.is_finite()) {
        Some(&bad) => Err(Error::NonFinite { value: bad, at: t }),
        None => Ok(()),
    }
}

/// `Σ_m C0(x_m) G(x - x_m, t) dx`; requires `t > 0`.
pub fn initial_layer(p: &DiffusionProblem, sg: SpaceGrid, x: f64, t: f64) -> Result<f64> {
    let tg = TimeGrid::new(p.final_time(), 1)?;
    StumSolver::new(p, sg, tg)?.initial_layer(x, t)
}

/// Source contribution at `(x, t)`; exactly `0` without a source.
pub fn source_layer(p: &DiffusionProblem, sg: SpaceGrid, tg: TimeGrid, x: f64, t: f64) -> Result<f64> {
    StumSolver::new(p, sg, tg)?.source_layer(x, t)
}

pub fn march_dirichlet(p: &DiffusionProblem, sg: SpaceGrid, tg: TimeGrid) -> Result<BoundaryHistory> {
    p.require(BcKind::Dirichlet)?;
    StumSolver::new(p, sg, tg)?.march()
}

pub fn march_neumann(p: &DiffusionProblem, sg: SpaceGrid, tg: TimeGrid) -> Result<BoundaryHistory> {
    p.require(BcKind::Neumann)?;
    StumSolver::new(p, sg, tg)?.march()
}

pub fn march_robin(p: &DiffusionProblem, sg: SpaceGrid, tg: TimeGrid) -> Result<BoundaryHistory> {
    p.require(BcKind::Robin)?;
    StumSolver::new(p, sg, tg)?.march()
}

/// Marches whichever formulation the problem's boundary data call for.
pub fn march(p: &DiffusionProblem, sg: SpaceGrid, tg: TimeGrid) -> Result<BoundaryHistory> {
    StumSolver::new(p, sg, tg)?.march()
}

pub fn reconstruct(
    p: &DiffusionProblem,
    sg: SpaceGrid,
    tg: TimeGrid,
    hist: &BoundaryHistory,
    x: f64,
    t: f64,
) -> Result<f64> {
    let expected = match p.bc_kind() {
        BcKind::Dirichlet => DensityKind::Flux,
        _ => DensityKind::Trace,
    };
    if hist.kind() != expected {
        return domain(format!("a {:?} history does not belong to a {:?} problem", hist.kind(), p.bc_kind()));
    }
    StumSolver::new(p, sg, tg)?.reconstruct(hist, x, t)
}

/// Marches and reconstructs on the cell midpoints at `times`.
pub fn solve_field(p: &DiffusionProblem, sg: SpaceGrid, tg: TimeGrid, times: &[f64]) -> Result<FieldGrid> {
    let solver = StumSolver::new(p, sg, tg)?;
    let hist = solver.march()?;
    solver.field(&hist, times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{fdm_reference, FourierOracle};
    use crate::problem::{constant, pulse, sine_mode, zero};
    use crate::quadrature::integrate_adaptive;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grids(l: f64, cells: usize, dt: f64, t: f64) -> (SpaceGrid, TimeGrid) {
        (SpaceGrid::new(l, cells).unwrap(), TimeGrid::covering(dt, t).unwrap())
    }

    fn max_rel(a: &[f64], b: &[f64]) -> f64 {
        let peak = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / peak
    }

    #[test]
    fn grid_construction() {
        assert_eq!(TimeGrid::covering(0.0625, 1.0).unwrap().steps(), 16);
        assert_eq!(TimeGrid::covering(0.005, 1.0).unwrap().steps(), 200);
        assert!(TimeGrid::new(0.0, 3).is_err());
        assert!(TimeGrid::new(0.1, 0).is_err());
        let sg = SpaceGrid::new(1.0, 161).unwrap();
        assert!((sg.dx() - 0.012422360248447204).abs() < 1e-15);
        assert!(sg.midpoints().iter().all(|x| x.abs() < 1.0));
        assert!(SpaceGrid::new(1.0, 1).is_err());
        let p = DiffusionProblem::dirichlet(0.05, 1.0, 1.0, zero()).unwrap();
        assert!(StumSolver::new(&p, sg, TimeGrid::new(0.1, 11).unwrap()).is_err());
        assert!(StumSolver::new(&p, SpaceGrid::new(2.0, 4).unwrap(), TimeGrid::new(0.1, 10).unwrap()).is_err());
    }

    #[test]
    fn initial_layer_examples() {
        let p = DiffusionProblem::neumann(0.05, 1.0, 1.0, constant(1.0)).unwrap();
        let sg = SpaceGrid::new(1.0, 161).unwrap();
        let v = initial_layer(&p, sg, 0.0, 1.0).unwrap();
        assert!((v - libm::erf(1.0 / 0.2f64.sqrt())).abs() < 1e-4);
        assert!(initial_layer(&p, sg, 0.0, 0.0).is_err());

        let p = DiffusionProblem::dirichlet(0.05, 1.0, 1.0, pulse(1.0, true)).unwrap();
        let sg = SpaceGrid::new(1.0, 41).unwrap();
        let v = initial_layer(&p, sg, 0.0, 0.0625).unwrap();
        let c0 = pulse(1.0, true);
        let exact = integrate_adaptive(|y| c0(y) * heat_kernel_1d(-y, 0.0625, 0.05), -1.0, 1.0, 1e-12).unwrap();
        assert!((v - exact).abs() / exact < 1e-6);
    }

    #[test]
    fn source_layer_partial_slab() {
        let p = DiffusionProblem::dirichlet(0.05, 1.0, 1.0, zero()).unwrap().with_source(Arc::new(|_, _| 1.0));
        let (sg, tg) = grids(1.0, 161, 0.0625, 1.0);
        assert!(source_layer(&p, sg, tg, 0.3, 0.5).unwrap() > 0.0);
        // t inside the first slab: ∫_0^t ∫ G dy ds = ∫_0^t erf-mass ds
        let t = 0.02;
        let v = source_layer(&p, sg, tg, 0.0, t).unwrap();
        let exact = integrate_adaptive(
            |s| if s <= 0.0 { 1.0 } else { libm::erf(1.0 / (4.0 * 0.05 * s).sqrt()) },
            0.0,
            t,
            1e-12,
        )
        .unwrap();
        assert!((v - exact).abs() / exact < 1e-10, "{v} {exact}");
        let free = DiffusionProblem::dirichlet(0.05, 1.0, 1.0, zero()).unwrap();
        assert_eq!(source_layer(&free, sg, tg, 0.0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn zero_problem_stays_zero() {
        for p in [
            DiffusionProblem::dirichlet(0.05, 1.0, 1.0, zero()).unwrap(),
            DiffusionProblem::neumann(0.05, 1.0, 1.0, zero()).unwrap(),
        ] {
            let (sg, tg) = grids(1.0, 21, 0.0625, 1.0);
            let solver = StumSolver::new(&p, sg, tg).unwrap();
            let hist = solver.march().unwrap();
            assert_eq!(hist.len(), 16);
            assert!(hist.slabs().iter().all(|s| s.flux_minus == 0.0 && s.flux_plus == 0.0));
            assert_eq!(solver.reconstruct(&hist, 0.3, 0.7).unwrap(), 0.0);
        }
    }

    #[test]
    fn neumann_equilibrium() {
        let p = DiffusionProblem::neumann(0.05, 1.0, 1.0, constant(0.8)).unwrap();
        let (sg, tg) = grids(1.0, 161, 0.005, 1.0);
        let hist = march_neumann(&p, sg, tg).unwrap();
        for s in hist.slabs() {
            assert!((s.trace_minus - 0.8).abs() < 1e-6 && (s.trace_plus - 0.8).abs() < 1e-6);
        }
    }

    #[test]
    fn boundary_identities() {
        let p = DiffusionProblem::neumann(0.05, 1.0, 1.0, pulse(1.0, true)).unwrap();
        let (sg, tg) = grids(1.0, 161, 0.005, 1.0);
        let solver = StumSolver::new(&p, sg, tg).unwrap();
        let hist = solver.march().unwrap();
        for k in [1, 50, 200] {
            let t = tg.time(k);
            let [cm, cp] = hist.unknowns(k);
            assert!((solver.reconstruct(&hist, -1.0, t).unwrap() - cm).abs() < 1e-10);
            assert!((solver.reconstruct(&hist, 1.0, t).unwrap() - cp).abs() < 1e-10);
        }

        let g: crate::problem::Func1 = Arc::new(|t: f64| (3.0 * t).sin());
        let p = DiffusionProblem::dirichlet(0.05, 1.0, 1.0, pulse(1.0, true))
            .unwrap()
            .with_boundary(BoundaryCondition::Dirichlet { minus: g.clone(), plus: constant(0.25) });
        let (sg, tg) = grids(1.0, 41, 0.0625, 1.0);
        let solver = StumSolver::new(&p, sg, tg).unwrap();
        let hist = solver.march().unwrap();
        for k in [1, 7, 16] {
            let t = tg.time(k);
            assert!((solver.reconstruct(&hist, -1.0, t).unwrap() - g(t)).abs() < 1e-8);
            assert!((solver.reconstruct(&hist, 1.0, t).unwrap() - 0.25).abs() < 1e-8);
        }
    }

    #[test]
    fn reconstruct_rejects_bad_times() {
        let p = DiffusionProblem::dirichlet(0.05, 1.0, 1.0, pulse(1.0, true)).unwrap();
        let (sg, tg) = grids(1.0, 41, 0.0625, 0.5);
        let solver = StumSolver::new(&p, sg, tg).unwrap();
        let hist = solver.march().unwrap();
        assert!(solver.reconstruct(&hist, 0.0, 0.0).is_err());
        assert!(solver.reconstruct(&hist, 0.0, 0.51).is_err());
        assert!(solver.reconstruct(&hist, 1.2, 0.3).is_err());
        assert!(solver.reconstruct(&hist, 0.0, 0.5).is_ok());
        let np = DiffusionProblem::neumann(0.05, 1.0, 1.0, zero()).unwrap();
        assert!(reconstruct(&np, sg, tg, &hist, 0.0, 0.25).is_err());
        assert!(march_neumann(&p, sg, tg).is_err());
    }

    #[test]
    fn single_sine_fluxes() {
        let l = 1.0;
        let p = DiffusionProblem::dirichlet(0.05, l, 1.0, sine_mode(l)).unwrap();
        let (sg, tg) = grids(l, 41, 0.0625, 1.0);
        let hist = march_dirichlet(&p, sg, tg).unwrap();
        let k = 4;
        let [vm, vp] = hist.unknowns(k);
        assert!(vm > 0.0 && vp < 0.0);
        let t = tg.slab_mid(k);
        let exact = PI / (2.0 * l) * (-0.05 * (PI / (2.0 * l)).powi(2) * t).exp();
        assert!((vm - exact).abs() / exact < 0.1, "{vm} {exact}");
        assert!((vp + exact).abs() / exact < 0.1, "{vp} {exact}");
    }

    #[test]
    fn reference_runs_match_oracle() {
        let times = [0.25, 0.5, 1.0];
        for (p, cells, dt) in [
            (DiffusionProblem::dirichlet(0.05, 1.0, 1.0, pulse(1.0, true)).unwrap(), 41, 0.0625),
            (DiffusionProblem::neumann(0.05, 1.0, 1.0, pulse(1.0, true)).unwrap(), 161, 0.005),
        ] {
            let (sg, tg) = grids(1.0, cells, dt, 1.0);
            let field = solve_field(&p, sg, tg, &times).unwrap();
            let oracle = FourierOracle::new(&p, 128).unwrap();
            for (j, &t) in times.iter().enumerate() {
                let exact = oracle.eval_many(field.xs(), t).unwrap();
                let err = max_rel(field.snapshot(j), &exact);
                assert!(err < 5e-2, "{:?} t = {t}: {err}", p.bc_kind());
            }
        }
    }

    #[test]
    fn robin_matches_fdm() {
        let p = DiffusionProblem::new(
            0.05,
            1.0,
            0.5,
            Arc::new(|x: f64| 1.0 + 0.5 * (PI * x).cos()),
            BoundaryCondition::Robin { a_minus: constant(1.0), b_minus: constant(0.2), a_plus: constant(2.0), b_plus: zero() },
        )
        .unwrap();
        let (sg, tg) = grids(1.0, 161, 0.0025, 0.5);
        let field = solve_field(&p, sg, tg, &[0.5]).unwrap();
        let fdm = fdm_reference(&p, 400, 2e-4, &[0.5]).unwrap();
        for (&x, &c) in field.xs().iter().zip(field.snapshot(0)) {
            let pos = (x + 1.0) / 0.005;
            let (i0, w) = (pos.floor() as usize, pos.fract());
            let f = fdm.snapshot(0)[i0] * (1.0 - w) + fdm.snapshot(0)[(i0 + 1).min(400)] * w;
            assert!((c - f).abs() < 2e-2, "x = {x}: {c} vs {f}");
        }
    }

    #[test]
    fn source_runs() {
        // unit source with insulated ends: C = t exactly
        let p = DiffusionProblem::neumann(0.05, 1.0, 0.5, zero()).unwrap().with_source(Arc::new(|_, _| 1.0));
        let (sg, tg) = grids(1.0, 81, 0.0125, 0.5);
        let field = solve_field(&p, sg, tg, &[0.5]).unwrap();
        assert!(field.snapshot(0).iter().all(|c| (c - 0.5).abs() / 0.5 < 1e-2));

        let p = DiffusionProblem::dirichlet(0.05, 1.0, 0.5, zero()).unwrap().with_source(Arc::new(|_, _| 1.0));
        let (sg, tg) = grids(1.0, 40, 0.0125, 0.5);
        let field = solve_field(&p, sg, tg, &[0.5]).unwrap();
        // nodes of an 80-cell grid contain the 40 cell midpoints at odd indices
        let fdm = fdm_reference(&p, 80, 2e-4, &[0.5]).unwrap();
        let reference: Vec<f64> = (0..40).map(|m| fdm.snapshot(0)[2 * m + 1]).collect();
        let err = max_rel(field.snapshot(0), &reference);
        assert!(err < 2e-2, "{err}");
    }

    #[test]
    fn causality_and_linearity() {
        let p = DiffusionProblem::neumann(0.05, 1.0, 1.0, pulse(1.0, true)).unwrap();
        let sg = SpaceGrid::new(1.0, 11).unwrap();
        let short = march(&p, sg, TimeGrid::new(0.05, 8).unwrap()).unwrap();
        let long = march(&p, sg, TimeGrid::new(0.05, 16).unwrap()).unwrap();
        assert_eq!(short.slabs(), &long.slabs()[..8]);

        let c0 = pulse(1.0, true);
        let doubled = p.clone().with_initial(Arc::new(move |x| 2.0 * c0(x)));
        let twice = march(&doubled, sg, TimeGrid::new(0.05, 8).unwrap()).unwrap();
        for (a, b) in short.slabs().iter().zip(twice.slabs()) {
            assert!((2.0 * a.trace_minus - b.trace_minus).abs() < 1e-12);
            assert!((2.0 * a.trace_plus - b.trace_plus).abs() < 1e-12);
        }
    }
}
