//! Dense direct solves.

use crate::error::{Error, Result};

/// Pivot ratio beyond which a factorization is treated as singular.
const MAX_PIVOT_RATIO: f64 = 1e14;

/// Solves `A x = b` for a row-major `n × n` matrix by Gaussian elimination
/// with partial pivoting. `A` and `b` are consumed as workspace.
pub(crate) fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    assert_eq!(a.len(), n * n, "matrix and right-hand side sizes disagree");
    let mut max_pivot = 0.0f64;
    let mut min_pivot = f64::INFINITY;
    for col in 0..n {
        let (piv_row, piv) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        max_pivot = max_pivot.max(piv);
        min_pivot = min_pivot.min(piv);
        if !(piv > 0.0) || max_pivot / min_pivot > MAX_PIVOT_RATIO {
            return Err(Error::Singular { condition: max_pivot / min_pivot });
        }
        if piv_row != col {
            for k in 0..n {
                a.swap(col * n + k, piv_row * n + k);
            }
            b.swap(col, piv_row);
        }
        let inv = 1.0 / a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] * inv;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[r * n + k] -= factor * a[col * n + k];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for k in r + 1..n {
            acc -= a[r * n + k] * x[k];
        }
        x[r] = acc / a[r * n + r];
    }
    Ok(x)
}

/// Solves a 2×2 system by Cramer's rule; `None` when
/// `|det| < 1e-14 · ‖A‖²` (max-entry norm).
pub(crate) fn solve_2x2(m: [[f64; 2]; 2], rhs: [f64; 2]) -> std::result::Result<[f64; 2], f64> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let norm = m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if !(det.abs() >= 1e-14 * norm * norm) || norm == 0.0 {
        return Err(det);
    }
    Ok([
        (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det,
        (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det,
    ])
}
