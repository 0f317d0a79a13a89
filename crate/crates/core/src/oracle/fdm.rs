use crate::error::{domain, Result};
use crate::problem::{BoundaryCondition, DiffusionProblem};
use crate::stum::FieldGrid;

/// Explicit stability limit on `ν dt / dx²`.
const STABILITY: f64 = 0.4;

/// Explicit central-difference march on `cells + 1` nodes including both
/// boundaries, returning snapshots at `times` (sorted, within `[0, T]`).
///
/// Dirichlet nodes are overwritten with the data; Neumann and Robin ends use
/// a ghost node so that the central difference at the boundary reproduces
/// `C_x(±L) = ±(b± - a± C±)`. Each interval between snapshots is split into
/// equal steps no longer than `dt`.
pub fn fdm_reference(problem: &DiffusionProblem, cells: usize, dt: f64, times: &[f64]) -> Result<FieldGrid> {
    if cells < 2 {
        return domain(format!("finite-difference grid needs at least 2 cells, got {cells}"));
    }
    let l = problem.half_length();
    let nu = problem.nu();
    let dx = 2.0 * l / cells as f64;
    if !(dt > 0.0 && dt <= STABILITY * dx * dx / nu) {
        return domain(format!(
            "explicit step dt = {dt} violates dt <= {STABILITY} dx²/ν = {}",
            STABILITY * dx * dx / nu
        ));
    }
    let mut last = 0.0;
    for &t in times {
        if !(t >= last && t <= problem.final_time() * (1.0 + 1e-12)) {
            return domain(format!("snapshot times must be sorted within [0, T], got {t}"));
        }
        last = t;
    }

    let xs: Vec<f64> = (0..=cells).map(|i| -l + i as f64 * dx).collect();
    let c0 = problem.initial();
    let mut u: Vec<f64> = xs.iter().map(|&x| c0(x)).collect();
    let mut next = u.clone();
    let source = problem.source();
    let bc = problem.boundary();
    if let BoundaryCondition::Dirichlet { minus, plus } = bc {
        u[0] = minus(0.0);
        u[cells] = plus(0.0);
    }

    let mut t = 0.0;
    let mut values = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - t;
        let steps = if span > 0.0 { (span / dt).ceil() as usize } else { 0 };
        let h = if steps > 0 { span / steps as f64 } else { 0.0 };
        let r = nu * h / (dx * dx);
        for _ in 0..steps {
            // ghost values at i = -1 and i = cells + 1
            let (ghost_lo, ghost_hi) = match bc {
                BoundaryCondition::Dirichlet { .. } => (0.0, 0.0),
                BoundaryCondition::Neumann { minus, plus } => {
                    (u[1] + 2.0 * dx * minus(t), u[cells - 1] + 2.0 * dx * plus(t))
                }
                BoundaryCondition::Robin { a_minus, b_minus, a_plus, b_plus } => (
                    u[1] + 2.0 * dx * (b_minus(t) - a_minus(t) * u[0]),
                    u[cells - 1] + 2.0 * dx * (b_plus(t) - a_plus(t) * u[cells]),
                ),
            };
            for i in 0..=cells {
                let left = if i == 0 { ghost_lo } else { u[i - 1] };
                let right = if i == cells { ghost_hi } else { u[i + 1] };
                let mut v = u[i] + r * (left - 2.0 * u[i] + right);
                if let Some(s) = source {
                    v += h * s(xs[i], t);
                }
                next[i] = v;
            }
            t += h;
            if let BoundaryCondition::Dirichlet { minus, plus } = bc {
                next[0] = minus(t);
                next[cells] = plus(t);
            }
            std::mem::swap(&mut u, &mut next);
        }
        t = target;
        if let Some(bad) = u.iter().find(|v| !v.is_finite()) {
            return domain(format!("finite-difference field became non-finite ({bad})"));
        }
        values.push(u.clone());
    }
    FieldGrid::new(problem.bc_kind(), xs, times.to_vec(), values)
}
