//! Deterministic 1D quadrature.
//!
//! Composite trapezoid, midpoint and Gauss-Legendre rules for the smooth
//! layer and projection integrals, plus a globally adaptive Gauss-Kronrod
//! (7/15) integrator that the test suites use as an independent oracle for
//! the closed-form kernel integrals.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

/// Bisection depth limit of [`integrate_adaptive`].
pub const MAX_ADAPTIVE_DEPTH: usize = 60;

/// A composite quadrature rule on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    Trapezoid { panels: usize },
    Midpoint { panels: usize },
    /// `order`-point Gauss-Legendre on each of `panels` equal panels.
    GaussLegendre { order: usize, panels: usize },
}

impl QuadratureRule {
    pub fn validate(&self) -> Result<()> {
        let panels = match *self {
            QuadratureRule::Trapezoid { panels } | QuadratureRule::Midpoint { panels } => panels,
            QuadratureRule::GaussLegendre { order, panels } => {
                if !(2..=64).contains(&order) {
                    return domain(format!("gauss-legendre order must be in [2, 64], got {order}"));
                }
                panels
            }
        };
        if panels == 0 {
            return domain("quadrature needs at least one panel");
        }
        Ok(())
    }

    /// Nodes and weights of the rule on `[a, b]`.
    pub fn points(&self, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        self.validate()?;
        if !(a.is_finite() && b.is_finite()) || a > b {
            return domain(format!("invalid integration interval [{a}, {b}]"));
        }
        Ok(match *self {
            QuadratureRule::Trapezoid { panels } => {
                let h = (b - a) / panels as f64;
                let xs: Vec<f64> = (0..=panels).map(|i| a + i as f64 * h).collect();
                let mut ws = vec![h; panels + 1];
                ws[0] = 0.5 * h;
                ws[panels] = 0.5 * h;
                (xs, ws)
            }
            QuadratureRule::Midpoint { panels } => {
                let h = (b - a) / panels as f64;
                let xs = (0..panels).map(|i| a + (i as f64 + 0.5) * h).collect();
                (xs, vec![h; panels])
            }
            QuadratureRule::GaussLegendre { order, panels } => {
                GaussLegendre::new(order)?.composite(a, b, panels)
            }
        })
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on `P_n` from Chebyshev guesses.
    pub fn new(order: usize) -> Result<Self> {
        if !(2..=64).contains(&order) {
            return domain(format!("gauss-legendre order must be in [2, 64], got {order}"));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights of the composite rule with `panels` equal panels.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
        let h = (b - a) / panels as f64;
        let mut xs = Vec::with_capacity(panels * self.nodes.len());
        let mut ws = Vec::with_capacity(xs.capacity());
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                xs.push(mid + 0.5 * h * x);
                ws.push(0.5 * h * w);
            }
        }
        (xs, ws)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn sample<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { value: v, at: x })
    }
}

/// Weighted sum of `rule` applied to `f` on `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rule: QuadratureRule) -> Result<f64> {
    let (xs, ws) = rule.points(a, b)?;
    let mut sum = 0.0;
    for (x, w) in xs.into_iter().zip(ws) {
        sum += w * sample(&mut f, x)?;
    }
    Ok(sum)
}

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod estimate and `|K15 - G7|` on `[a, b]`.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = sample(f, c)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = sample(f, c - dx)? + sample(f, c + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).abs()))
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: usize,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive integration: the segment with the largest error
/// estimate is bisected until the summed estimate is at most
/// `rel_tol * |result|`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return domain(format!("adaptive quadrature needs a < b, got [{a}, {b}]"));
    }
    if !(rel_tol >= 1e-13) {
        return domain(format!("relative tolerance must be >= 1e-13, got {rel_tol}"));
    }
    let (value, error) = gk15(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error, depth: 0 });
    let mut total = value;
    let mut total_err = error;
    loop {
        if total_err <= rel_tol * total.abs() || total_err == 0.0 {
            // re-sum to shed the drift of the running totals
            let mut parts: Vec<&Segment> = heap.iter().collect();
            parts.sort_by(|l, r| l.a.total_cmp(&r.a));
            return Ok(parts.iter().map(|s| s.value).sum());
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.depth >= MAX_ADAPTIVE_DEPTH {
            return Err(Error::Convergence { depth: MAX_ADAPTIVE_DEPTH, at: 0.5 * (worst.a + worst.b) });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gk15(&mut f, worst.a, mid)?;
        let (rv, re) = gk15(&mut f, mid, worst.b)?;
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        let depth = worst.depth + 1;
        heap.push(Segment { a: worst.a, b: mid, value: lv, error: le, depth });
        heap.push(Segment { a: mid, b: worst.b, value: rv, error: re, depth });
    }
}
