//! Steady 2D diffusion `ν ΔC + σ = 0` in a polygon with Robin data
//! `∂C/∂n + a C = b`, solved by a second-kind boundary integral equation on
//! constant elements with midpoint collocation.
//!
//! With `G(ξ, x) = ln|ξ - x| / 2π`, Green's identity gives
//!
//! ```text
//! ε(x) C(x) = Σ_j (a_j C_j - b_j) ∫_j G dΓ + Σ_j C_j ∫_j ∂G/∂n dΓ - (1/ν) ∫_Ω σ G dΩ
//! ```
//!
//! with `ε = 1/2` at element midpoints, `1` inside and `0` outside.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::linalg::solve_dense;
use crate::quadrature::GaussLegendre;

/// Gauss-Legendre order for off-diagonal single-layer integrals.
const ELEMENT_ORDER: usize = 8;
/// Default cells per axis of the domain-integral grid.
pub const DEFAULT_DOMAIN_CELLS: usize = 64;

type Point = [f64; 2];

/// One straight boundary element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub start: Point,
    pub end: Point,
    pub midpoint: Point,
    pub length: f64,
    /// Outward unit normal.
    pub normal: Point,
}

impl Element {
    fn new(start: Point, end: Point) -> Self {
        let (dx, dy) = (end[0] - start[0], end[1] - start[1]);
        let length = dx.hypot(dy);
        Self {
            start,
            end,
            midpoint: [0.5 * (start[0] + end[0]), 0.5 * (start[1] + end[1])],
            length,
            normal: [dy / length, -dx / length],
        }
    }

    /// `∫ ∂G/∂n_ξ dΓ(ξ)` seen from `x`: the signed angle the element
    /// subtends at `x`, over `2π`.
    pub fn double_layer(&self, x: Point) -> f64 {
        let (ax, ay) = (self.start[0] - x[0], self.start[1] - x[1]);
        let (bx, by) = (self.end[0] - x[0], self.end[1] - x[1]);
        (ax * by - ay * bx).atan2(ax * bx + ay * by) / (2.0 * PI)
    }

    /// `∫ G dΓ` seen from `x`, in closed form.
    pub fn single_layer(&self, x: Point) -> f64 {
        let t = [(self.end[0] - self.start[0]) / self.length, (self.end[1] - self.start[1]) / self.length];
        let rel = [self.start[0] - x[0], self.start[1] - x[1]];
        let u = rel[0] * t[0] + rel[1] * t[1];
        let d = rel[0] * t[1] - rel[1] * t[0];
        // F(w) = ∫ ln sqrt(w² + d²) dw
        let f = |w: f64| {
            let r2 = w * w + d * d;
            let log_term = if r2 > 0.0 { 0.5 * w * r2.ln() } else { 0.0 };
            let atan_term = if d != 0.0 { d * (w / d).atan() } else { 0.0 };
            log_term - w + atan_term
        };
        (f(u + self.length) - f(u)) / (2.0 * PI)
    }

    /// `∫ G dΓ` seen from this element's own midpoint.
    pub fn self_single_layer(&self) -> f64 {
        let h = self.length;
        h / (2.0 * PI) * ((0.5 * h).ln() - 1.0)
    }
}

/// A counter-clockwise simple polygon split into straight elements.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyBemMesh {
    vertices: Vec<Point>,
    elements: Vec<Element>,
}

impl SteadyBemMesh {
    /// Splits each polygon side into `per_side` equal elements.
    pub fn from_polygon(vertices: &[Point], per_side: usize) -> Result<Self> {
        if vertices.len() < 3 {
            return domain("polygon needs at least 3 vertices");
        }
        if per_side < 1 {
            return domain("each side needs at least one element");
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return domain("polygon vertices must be finite");
        }
        let n = vertices.len();
        for i in 0..n {
            let (p, q) = (vertices[i], vertices[(i + 1) % n]);
            if p == q {
                return domain(format!("polygon side {i} has zero length"));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if !adjacent && segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]) {
                    return domain(format!("polygon sides {i} and {j} intersect"));
                }
            }
        }
        if signed_area(vertices) <= 0.0 {
            return domain("polygon must be counter-clockwise");
        }
        let mut elements = Vec::with_capacity(n * per_side);
        for i in 0..n {
            let (p, q) = (vertices[i], vertices[(i + 1) % n]);
            let at = |k: usize| {
                let s = k as f64 / per_side as f64;
                [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]
            };
            for k in 0..per_side {
                elements.push(Element::new(at(k), at(k + 1)));
            }
        }
        Ok(Self { vertices: vertices.to_vec(), elements })
    }

    /// `[0, 1]²` with `elements` elements (a positive multiple of 4).
    pub fn unit_square(elements: usize) -> Result<Self> {
        if elements == 0 || !elements.is_multiple_of(4) {
            return domain(format!("unit square needs a positive multiple of 4 elements, got {elements}"));
        }
        Self::from_polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], elements / 4)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Winding number of the boundary around `x` (1 inside, 0 outside).
    pub fn winding_number(&self, x: Point) -> i32 {
        let n = self.vertices.len();
        let mut wn = 0;
        for i in 0..n {
            let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let side = (q[0] - p[0]) * (x[1] - p[1]) - (x[0] - p[0]) * (q[1] - p[1]);
            if p[1] <= x[1] {
                if q[1] > x[1] && side > 0.0 {
                    wn += 1;
                }
            } else if q[1] <= x[1] && side < 0.0 {
                wn -= 1;
            }
        }
        wn
    }

    /// Whether `x` lies on the boundary, to within `tol`.
    pub fn on_boundary(&self, x: Point, tol: f64) -> bool {
        let n = self.vertices.len();
        (0..n).any(|i| point_segment_distance(x, self.vertices[i], self.vertices[(i + 1) % n]) <= tol)
    }

    fn scale(&self) -> f64 {
        let (lo, hi) = self.bounds();
        (hi[0] - lo[0]).max(hi[1] - lo[1])
    }

    fn bounds(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// `Σ_j ∫_j ∂G/∂n dΓ` at `x`, skipping any element whose midpoint is `x`.
    pub fn gauss_flux(&self, x: Point) -> f64 {
        self.elements.iter().filter(|e| e.midpoint != x).map(|e| e.double_layer(x)).sum()
    }
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1]).sum::<f64>()
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let on = |a: Point, b: Point, c: Point| {
        c[0] >= a[0].min(b[0]) && c[0] <= a[0].max(b[0]) && c[1] >= a[1].min(b[1]) && c[1] <= a[1].max(b[1])
    };
    let (d1, d2) = (cross(q1, q2, p1), cross(q1, q2, p2));
    let (d3, d4) = (cross(p1, p2, q1), cross(p1, p2, q2));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on(q1, q2, p1))
        || (d2 == 0.0 && on(q1, q2, p2))
        || (d3 == 0.0 && on(p1, p2, q1))
        || (d4 == 0.0 && on(p1, p2, q2))
}

fn point_segment_distance(x: Point, a: Point, b: Point) -> f64 {
    let (abx, aby) = (b[0] - a[0], b[1] - a[1]);
    let s = (((x[0] - a[0]) * abx + (x[1] - a[1]) * aby) / (abx * abx + aby * aby)).clamp(0.0, 1.0);
    (x[0] - a[0] - s * abx).hypot(x[1] - a[1] - s * aby)
}

/// A function of a boundary point and its outward normal.
pub type BoundaryFn = Arc<dyn Fn(Point, Point) -> f64 + Send + Sync>;
/// A function on the domain.
pub type DomainFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// Robin coefficients `a`, `b` on the boundary and an optional source `σ`.
#[derive(Clone)]
pub struct RobinData {
    pub a: BoundaryFn,
    pub b: BoundaryFn,
    pub sigma: Option<DomainFn>,
    /// Cells per axis of the clipped grid for the `σ` integral.
    pub domain_cells: usize,
}

impl RobinData {
    pub fn new(a: BoundaryFn, b: BoundaryFn) -> Self {
        Self { a, b, sigma: None, domain_cells: DEFAULT_DOMAIN_CELLS }
    }

    /// `a = b = 0`, no source.
    pub fn homogeneous() -> Self {
        Self::new(Arc::new(|_, _| 0.0), Arc::new(|_, _| 0.0))
    }

    pub fn with_source(mut self, sigma: DomainFn) -> Self {
        self.sigma = Some(sigma);
        self
    }

    fn sample(&self, mesh: &SteadyBemMesh) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut a = Vec::with_capacity(mesh.len());
        let mut b = Vec::with_capacity(mesh.len());
        for e in mesh.elements() {
            let (av, bv) = ((self.a)(e.midpoint, e.normal), (self.b)(e.midpoint, e.normal));
            if !(av.is_finite() && bv.is_finite()) {
                return domain(format!("Robin data not finite at {:?}", e.midpoint));
            }
            a.push(av);
            b.push(bv);
        }
        Ok((a, b))
    }
}

/// Cell centres and areas of the clipped domain grid with `σ` values.
fn domain_samples(mesh: &SteadyBemMesh, data: &RobinData) -> Result<Vec<(Point, f64)>> {
    let Some(sigma) = &data.sigma else { return Ok(Vec::new()) };
    if data.domain_cells < 1 {
        return domain("domain grid needs at least one cell per axis");
    }
    let (lo, hi) = mesh.bounds();
    let n = data.domain_cells;
    let (hx, hy) = ((hi[0] - lo[0]) / n as f64, (hi[1] - lo[1]) / n as f64);
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let c = [lo[0] + (i as f64 + 0.5) * hx, lo[1] + (j as f64 + 0.5) * hy];
            if mesh.winding_number(c) == 0 {
                continue;
            }
            let s = sigma(c);
            if !s.is_finite() {
                return domain(format!("source not finite at {c:?}"));
            }
            out.push((c, s * hx * hy));
        }
    }
    Ok(out)
}

/// `∫_Ω σ G dΩ` at `x` on the clipped grid. A cell centred on `x` is
/// replaced by the disc of equal area.
fn domain_integral(samples: &[(Point, f64)], cell_area: f64, x: Point) -> f64 {
    samples
        .iter()
        .map(|&(c, weight)| {
            let r = (c[0] - x[0]).hypot(c[1] - x[1]);
            if r > 1e-12 {
                weight * r.ln() / (2.0 * PI)
            } else {
                let rho = (cell_area / PI).sqrt();
                weight / cell_area * 0.5 * rho * rho * (rho.ln() - 0.5)
            }
        })
        .sum()
}

fn cell_area(mesh: &SteadyBemMesh, data: &RobinData) -> f64 {
    let (lo, hi) = mesh.bounds();
    let n = data.domain_cells.max(1) as f64;
    (hi[0] - lo[0]) * (hi[1] - lo[1]) / (n * n)
}

fn check_nu(nu: f64) -> Result<()> {
    if nu.is_finite() && nu > 0.0 {
        Ok(())
    } else {
        domain(format!("nu must be positive and finite, got {nu}"))
    }
}

/// Boundary values `C` at the element midpoints.
pub fn assemble_and_solve(mesh: &SteadyBemMesh, data: &RobinData, nu: f64) -> Result<Vec<f64>> {
    check_nu(nu)?;
    let n = mesh.len();
    let (a, b) = data.sample(mesh)?;
    let rule = GaussLegendre::new(ELEMENT_ORDER)?;
    let samples = domain_samples(mesh, data)?;
    let area = cell_area(mesh, data);
    let els = mesh.elements();

    let mut matrix = vec![0.0; n * n];
    let mut rhs = vec![0.0; n];
    for (i, ei) in els.iter().enumerate() {
        let x = ei.midpoint;
        let row = &mut matrix[i * n..(i + 1) * n];
        let mut r = 0.0;
        for (j, ej) in els.iter().enumerate() {
            let (g, h) = if i == j {
                (ej.self_single_layer(), 0.0)
            } else {
                (gauss_single_layer(&rule, ej, x), ej.double_layer(x))
            };
            row[j] -= a[j] * g + h;
            r -= b[j] * g;
        }
        row[i] += 0.5;
        rhs[i] = r - domain_integral(&samples, area, x) / nu;
    }
    let c = solve_dense(matrix, rhs)?;
    if let Some(bad) = c.iter().find(|v| !v.is_finite()) {
        return Err(Error::Singular { condition: *bad });
    }
    Ok(c)
}

fn gauss_single_layer(rule: &GaussLegendre, e: &Element, x: Point) -> f64 {
    let half = 0.5 * e.length;
    let t = [(e.end[0] - e.start[0]) / e.length, (e.end[1] - e.start[1]) / e.length];
    rule.nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&s, &w)| {
            let p = [e.midpoint[0] + half * s * t[0], e.midpoint[1] + half * s * t[1]];
            w * (p[0] - x[0]).hypot(p[1] - x[1]).ln()
        })
        .sum::<f64>()
        * half
        / (2.0 * PI)
}

/// The right-hand side of the representation at any point off the
/// boundary: `C(x)` inside, `0` outside.
pub fn layer_potential(mesh: &SteadyBemMesh, data: &RobinData, nu: f64, boundary_c: &[f64], x: Point) -> Result<f64> {
    check_nu(nu)?;
    if boundary_c.len() != mesh.len() {
        return domain(format!("expected {} boundary values, got {}", mesh.len(), boundary_c.len()));
    }
    if !(x[0].is_finite() && x[1].is_finite()) || mesh.on_boundary(x, 1e-12 * mesh.scale()) {
        return domain(format!("point {x:?} lies on the boundary"));
    }
    let (a, b) = data.sample(mesh)?;
    let samples = domain_samples(mesh, data)?;
    let mut v = -domain_integral(&samples, cell_area(mesh, data), x) / nu;
    for (j, e) in mesh.elements().iter().enumerate() {
        let c = boundary_c[j];
        v += (a[j] * c - b[j]) * e.single_layer(x) + c * e.double_layer(x);
    }
    Ok(v)
}

/// `C(x)` at a point strictly inside the polygon.
pub fn interior_value(mesh: &SteadyBemMesh, data: &RobinData, nu: f64, boundary_c: &[f64], x: Point) -> Result<f64> {
    if mesh.winding_number(x) == 0 {
        return domain(format!("point {x:?} is outside the domain"));
    }
    layer_potential(mesh, data, nu, boundary_c, x)
}

/// Largest `|C_j - exact(midpoint_j)|`.
pub fn max_boundary_error(mesh: &SteadyBemMesh, c: &[f64], exact: impl Fn(Point) -> f64) -> f64 {
    mesh.elements().iter().zip(c).fold(0.0f64, |m, (e, v)| m.max((v - exact(e.midpoint)).abs()))
}
