use std::sync::Arc;

use stgirm::steady_bem::{
    assemble_and_solve, interior_value, layer_potential, max_boundary_error, RobinData, SteadyBemMesh,
};

/// Harmonic `x1 x2` with Robin data `a = 2`.
fn saddle() -> RobinData {
    RobinData::new(
        Arc::new(|_, _| 2.0),
        Arc::new(|p: [f64; 2], n: [f64; 2]| p[1] * n[0] + p[0] * n[1] + 2.0 * p[0] * p[1]),
    )
}

fn saddle_exact(p: [f64; 2]) -> f64 {
    p[0] * p[1]
}

#[test]
fn non_square_polygon_reproduces_a_harmonic_field() {
    // a convex pentagon and a non-convex L-shape
    let pentagon = [[0.0, 0.0], [2.0, 0.0], [2.5, 1.0], [1.0, 2.0], [-0.5, 1.0]];
    let l_shape = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
    let data = saddle();
    for verts in [&pentagon[..], &l_shape[..]] {
        let mut errs = Vec::new();
        for per_side in [32, 64] {
            let mesh = SteadyBemMesh::from_polygon(verts, per_side).unwrap();
            let c = assemble_and_solve(&mesh, &data, 1.0).unwrap();
            errs.push(max_boundary_error(&mesh, &c, saddle_exact));
        }
        assert!(errs[1] < errs[0], "{errs:?}");
        assert!(errs[1] <= 5e-3, "{errs:?}");
    }
}

#[test]
fn interior_and_exterior_evaluation() {
    let verts = [[0.0, 0.0], [2.0, 0.0], [2.5, 1.0], [1.0, 2.0], [-0.5, 1.0]];
    let mesh = SteadyBemMesh::from_polygon(&verts, 64).unwrap();
    let data = saddle();
    let c = assemble_and_solve(&mesh, &data, 1.0).unwrap();
    for p in [[1.0, 1.0], [0.5, 0.5], [1.8, 0.6]] {
        let v = interior_value(&mesh, &data, 1.0, &c, p).unwrap();
        assert!((v - saddle_exact(p)).abs() <= 5e-3, "{p:?}: {v}");
    }
    for p in [[3.0, 3.0], [-1.0, -1.0], [1.0, -0.5]] {
        assert!(interior_value(&mesh, &data, 1.0, &c, p).is_err());
        let v = layer_potential(&mesh, &data, 1.0, &c, p).unwrap();
        assert!(v.abs() <= 5e-3, "{p:?}: {v}");
    }
    assert!(layer_potential(&mesh, &data, 1.0, &c, [1.0, 0.0]).is_err());
}

#[test]
fn solution_is_invariant_under_translation() {
    let base = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let moved: Vec<[f64; 2]> = base.iter().map(|p| [p[0] + 3.0, p[1] - 2.0]).collect();
    // constant field with a = 1 has b = 1 on any polygon
    let data = RobinData::new(Arc::new(|_, _| 1.0), Arc::new(|_, _| 1.0));
    for verts in [&base[..], &moved[..]] {
        let mesh = SteadyBemMesh::from_polygon(verts, 16).unwrap();
        let c = assemble_and_solve(&mesh, &data, 1.0).unwrap();
        assert!(max_boundary_error(&mesh, &c, |_| 1.0) <= 1e-10);
    }
}

#[test]
fn clockwise_or_degenerate_polygons_are_rejected() {
    let cw = [[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
    assert!(SteadyBemMesh::from_polygon(&cw, 4).is_err());
    let bowtie = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
    assert!(SteadyBemMesh::from_polygon(&bowtie, 4).is_err());
    assert!(SteadyBemMesh::from_polygon(&[[0.0, 0.0], [1.0, 0.0]], 4).is_err());
    assert!(SteadyBemMesh::unit_square(30).is_err());
}
