use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use super::config::{GaussianSign, InitialSpec, ProblemKind, RunConfig};
use super::CliError;
use crate::oracle::FourierOracle;
use crate::problem::{constant, cosine_mode, pulse, sine_mode, DiffusionProblem, Func1};
use crate::steady_bem::{assemble_and_solve, max_boundary_error, RobinData, SteadyBemMesh};
use crate::stum::{SpaceGrid, StumSolver, TimeGrid};

/// Step above which the Neumann run prints a time-step sensitivity note.
pub const NEUMANN_REFERENCE_DT: f64 = 0.005;
/// Element counts of the steady manufactured-solution report.
pub const STEADY_MESHES: [usize; 3] = [64, 128, 256];
/// Gates on the finest steady mesh: `x1` and `x1² - x2²`.
pub const STEADY_TOLERANCES: [f64; 2] = [1e-3, 5e-3];

/// Error norms of one snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotError {
    pub t: f64,
    pub max_rel: f64,
    pub l2_rel: f64,
}

/// Outcome of an unsteady run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub csv: String,
    pub snapshots: Vec<SnapshotError>,
    pub wall_ms: f64,
}

impl RunReport {
    pub fn max_rel(&self) -> f64 {
        self.snapshots.iter().fold(0.0, |m, s| m.max(s.max_rel))
    }

    pub fn l2_rel(&self) -> f64 {
        self.snapshots.iter().fold(0.0, |m, s| m.max(s.l2_rel))
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.snapshots.iter().all(|s| s.max_rel <= tol)
    }
}

fn read_profile(path: &Path, half_length: f64) -> Result<Func1, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let parsed = match cols.as_slice() {
            [x, v] => x.parse::<f64>().ok().zip(v.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some((x, v)) if x.is_finite() && v.is_finite() => pts.push((x, v)),
            _ => return Err(CliError::Io(format!("{}: line {}: expected two numbers", path.display(), n + 1))),
        }
    }
    if pts.len() < 2 || pts.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(CliError::Io(format!("{}: need at least two points with increasing x", path.display())));
    }
    let tol = 1e-12 * half_length;
    if pts[0].0 > -half_length + tol || pts[pts.len() - 1].0 < half_length - tol {
        return Err(CliError::Io(format!("{}: profile does not cover [-{half_length}, {half_length}]", path.display())));
    }
    Ok(Arc::new(move |x: f64| {
        let i = pts.partition_point(|p| p.0 <= x).clamp(1, pts.len() - 1);
        let (a, b) = (pts[i - 1], pts[i]);
        a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
    }))
}

/// Builds the unsteady problem a config describes.
pub fn build_problem(cfg: &RunConfig) -> Result<DiffusionProblem, CliError> {
    let l = cfg.half_length;
    let initial = match &cfg.initial {
        InitialSpec::Gaussian => pulse(l, cfg.gaussian_sign == GaussianSign::Minus),
        InitialSpec::SingleMode if cfg.problem == ProblemKind::Neumann => cosine_mode(l),
        InitialSpec::SingleMode => sine_mode(l),
        InitialSpec::Constant(v) => constant(*v),
        InitialSpec::File(path) => read_profile(path, l)?,
    };
    let p = match cfg.problem {
        ProblemKind::Dirichlet => DiffusionProblem::dirichlet(cfg.nu, l, cfg.final_time, initial),
        ProblemKind::Neumann => DiffusionProblem::neumann(cfg.nu, l, cfg.final_time, initial),
        ProblemKind::Steady => return Err(CliError::Usage("steady runs have no unsteady problem".into())),
    };
    Ok(p?)
}

/// Marches, reconstructs at the snapshot times, and compares with the
/// spectral solution.
pub fn run_unsteady(cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let problem = build_problem(cfg)?;
    let sg = SpaceGrid::new(cfg.half_length, cfg.cells)?;
    let tg = TimeGrid::covering(cfg.dt, cfg.final_time)?;
    if let Some(&t) = cfg.snapshots.iter().find(|&&t| t > tg.end() * (1.0 + 1e-12)) {
        return Err(CliError::Usage(format!("snapshot {t} lies beyond the last step t_K = {}", tg.end())));
    }
    let solver = StumSolver::new(&problem, sg, tg)?;
    let hist = solver.march()?;
    let field = solver.field(&hist, &cfg.snapshots)?;
    let oracle = FourierOracle::new(&problem, cfg.modes)?;

    let mut csv = String::from("x,t,C,C_exact,abs_err\n");
    let mut snapshots = Vec::with_capacity(cfg.snapshots.len());
    for (j, &t) in cfg.snapshots.iter().enumerate() {
        let exact = oracle.eval_many(field.xs(), t)?;
        let (mut peak, mut worst, mut num, mut den) = (0.0f64, 0.0f64, 0.0, 0.0);
        for ((&x, &c), &e) in field.xs().iter().zip(field.snapshot(j)).zip(&exact) {
            let err = (c - e).abs();
            let _ = writeln!(csv, "{x:.16e},{t:.16e},{c:.16e},{e:.16e},{err:.16e}");
            peak = peak.max(e.abs());
            worst = worst.max(err);
            num += err * err;
            den += e * e;
        }
        let (max_rel, l2_rel) = if peak > 0.0 { (worst / peak, (num / den).sqrt()) } else { (worst, num.sqrt()) };
        snapshots.push(SnapshotError { t, max_rel, l2_rel });
    }
    Ok(RunReport { csv, snapshots, wall_ms: start.elapsed().as_secs_f64() * 1e3 })
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Dt,
    Cells,
    Modes,
}

impl std::str::FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dt" => Ok(Self::Dt),
            "M" => Ok(Self::Cells),
            "modes" => Ok(Self::Modes),
            _ => Err(format!("cannot sweep '{s}' (expected dt, M or modes)")),
        }
    }
}

/// One row per value: `value,max_rel_err,l2_rel_err,wall_time_ms`.
/// Errors are the largest over the snapshot times.
pub fn sweep(cfg: &RunConfig, param: SweepParam, values: &[f64]) -> Result<String, CliError> {
    if cfg.problem == ProblemKind::Steady {
        return Err(CliError::Usage("sweeps apply to dirichlet and neumann runs only".into()));
    }
    if values.len() < 2 {
        return Err(CliError::Usage("a sweep needs at least two values".into()));
    }
    let mut out = String::from("value,max_rel_err,l2_rel_err,wall_time_ms\n");
    for &v in values {
        let mut c = cfg.clone();
        match param {
            SweepParam::Dt => c.dt = v,
            SweepParam::Cells | SweepParam::Modes => {
                if !(v >= 1.0 && v.fract() == 0.0) {
                    return Err(CliError::Usage(format!("{param:?} values must be positive integers, got {v}")));
                }
                if param == SweepParam::Cells {
                    c.cells = v as usize;
                } else {
                    c.modes = v as usize;
                }
            }
        }
        let r = run_unsteady(&c)?;
        let _ = writeln!(out, "{v},{:.16e},{:.16e},{:.3}", r.max_rel(), r.l2_rel(), r.wall_ms);
    }
    Ok(out)
}

/// A named manufactured field: Robin data and the exact solution.
pub type SteadyCase = (&'static str, RobinData, fn([f64; 2]) -> f64);

/// Manufactured harmonic fields on the unit square with `a = 1`.
pub fn steady_cases() -> [SteadyCase; 2] {
    [
        (
            "x1",
            RobinData::new(Arc::new(|_, _| 1.0), Arc::new(|p: [f64; 2], n: [f64; 2]| n[0] + p[0])),
            |p| p[0],
        ),
        (
            "x1^2-x2^2",
            RobinData::new(
                Arc::new(|_, _| 1.0),
                Arc::new(|p: [f64; 2], n: [f64; 2]| 2.0 * p[0] * n[0] - 2.0 * p[1] * n[1] + p[0] * p[0] - p[1] * p[1]),
            ),
            |p| p[0] * p[0] - p[1] * p[1],
        ),
    ]
}

/// Outcome of the steady report: CSV plus whether the finest-mesh gates hold.
pub struct SteadyReport {
    pub csv: String,
    /// `(field, elements, max_abs_err)`.
    pub rows: Vec<(String, usize, f64)>,
    pub passes: bool,
}

pub fn run_steady(cfg: &RunConfig) -> Result<SteadyReport, CliError> {
    let mut csv = String::from("field,elements,max_abs_err\n");
    let mut rows = Vec::new();
    let mut passes = true;
    for ((name, data, exact), tol) in steady_cases().into_iter().zip(STEADY_TOLERANCES) {
        let mut last = f64::INFINITY;
        for n in STEADY_MESHES {
            let mesh = SteadyBemMesh::unit_square(n)?;
            let c = assemble_and_solve(&mesh, &data, cfg.nu)?;
            let err = max_boundary_error(&mesh, &c, exact);
            let _ = writeln!(csv, "{name},{n},{err:.16e}");
            rows.push((name.to_string(), n, err));
            last = err;
        }
        passes &= last <= tol;
    }
    Ok(SteadyReport { csv, rows, passes })
}
