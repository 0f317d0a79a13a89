use std::sync::Arc;

use proptest::prelude::*;
use stgirm::oracle::{fdm_reference, FourierOracle};
use stgirm::problem::{constant, pulse, zero, BoundaryCondition, DiffusionProblem, Func1};
use stgirm::stum::{march, BoundaryHistory, SpaceGrid, StumSolver, TimeGrid};

fn dirichlet_run() -> (DiffusionProblem, SpaceGrid, TimeGrid) {
    let p = DiffusionProblem::dirichlet(0.05, 1.0, 1.0, pulse(1.0, true)).unwrap();
    (p, SpaceGrid::new(1.0, 41).unwrap(), TimeGrid::covering(0.0625, 1.0).unwrap())
}

fn neumann_run() -> (DiffusionProblem, SpaceGrid, TimeGrid) {
    let p = DiffusionProblem::neumann(0.05, 1.0, 1.0, pulse(1.0, true)).unwrap();
    (p, SpaceGrid::new(1.0, 161).unwrap(), TimeGrid::covering(0.005, 1.0).unwrap())
}

fn trapezoid_mass(solver: &StumSolver, hist: &BoundaryHistory, t: f64) -> f64 {
    let l = solver.space().half_length();
    let mut pts = vec![(-l, solver.reconstruct(hist, -l, t).unwrap())];
    for x in solver.space().midpoints() {
        pts.push((x, solver.reconstruct(hist, x, t).unwrap()));
    }
    pts.push((l, solver.reconstruct(hist, l, t).unwrap()));
    pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}

#[test]
fn dirichlet_boundary_values_are_reproduced() {
    let (p, sg, tg) = dirichlet_run();
    let solver = StumSolver::new(&p, sg, tg).unwrap();
    let hist = solver.march().unwrap();
    for k in 1..=tg.steps() {
        for x in [-1.0, 1.0] {
            assert!(solver.reconstruct(&hist, x, tg.time(k)).unwrap().abs() < 1e-8);
        }
    }
}

#[test]
fn dirichlet_centre_value() {
    let (p, sg, tg) = dirichlet_run();
    let solver = StumSolver::new(&p, sg, tg).unwrap();
    let hist = solver.march().unwrap();
    let exact = FourierOracle::new(&p, 128).unwrap().eval(0.0, 0.5).unwrap();
    assert!((solver.reconstruct(&hist, 0.0, 0.5).unwrap() - exact).abs() / exact < 5e-2);
}

#[test]
fn maximum_principle() {
    let (p, sg, tg) = dirichlet_run();
    let solver = StumSolver::new(&p, sg, tg).unwrap();
    let hist = solver.march().unwrap();
    let field = solver.field(&hist, &[0.0625, 0.25, 0.5, 0.75, 1.0]).unwrap();
    for row in field.values() {
        assert!(row.iter().all(|&c| (-0.02..=1.02).contains(&c)));
    }
}

#[test]
fn neumann_mass_is_conserved() {
    let (p, sg, tg) = neumann_run();
    let solver = StumSolver::new(&p, sg, tg).unwrap();
    let hist = solver.march().unwrap();
    let m0 = trapezoid_mass(&solver, &hist, 0.25);
    for t in [0.5, 1.0] {
        assert!((trapezoid_mass(&solver, &hist, t) - m0).abs() / m0 < 1e-2);
    }
}

#[test]
fn neumann_boundary_gradient() {
    // nonzero outward flux: C_x(-L) = -f-, C_x(+L) = +f+
    let p = DiffusionProblem::neumann(0.05, 1.0, 1.0, pulse(1.0, true))
        .unwrap()
        .with_boundary(BoundaryCondition::Neumann { minus: constant(0.1), plus: constant(0.2) });
    let (sg, tg) = (SpaceGrid::new(1.0, 161).unwrap(), TimeGrid::covering(0.005, 1.0).unwrap());
    let solver = StumSolver::new(&p, sg, tg).unwrap();
    let hist = solver.march().unwrap();
    let dx = sg.dx();
    for t in [0.25, 0.5, 1.0] {
        let left = (solver.reconstruct(&hist, -1.0 + dx, t).unwrap() - solver.reconstruct(&hist, -1.0, t).unwrap()) / dx;
        let right = (solver.reconstruct(&hist, 1.0, t).unwrap() - solver.reconstruct(&hist, 1.0 - dx, t).unwrap()) / dx;
        assert!((left + 0.1).abs() / 0.1 < 0.1, "t = {t}: {left}");
        assert!((right - 0.2).abs() / 0.2 < 0.1, "t = {t}: {right}");
    }

    // insulated ends: the gradient stays small against the field's own scale
    let (p, sg, tg) = neumann_run();
    let solver = StumSolver::new(&p, sg, tg).unwrap();
    let hist = solver.march().unwrap();
    let dx = sg.dx();
    for t in [0.25, 0.5, 1.0] {
        let xs: Vec<f64> = (0..=200).map(|i| -1.0 + i as f64 / 100.0).collect();
        let c: Vec<f64> = xs.iter().map(|&x| solver.reconstruct(&hist, x, t).unwrap()).collect();
        let scale = c.windows(2).fold(0.0f64, |m, w| m.max(((w[1] - w[0]) * 100.0).abs()));
        let left = (solver.reconstruct(&hist, -1.0 + dx, t).unwrap() - solver.reconstruct(&hist, -1.0, t).unwrap()) / dx;
        assert!(left.abs() < 0.1 * scale);
    }
}

#[test]
fn neumann_flux_run_matches_oracle() {
    let p = DiffusionProblem::neumann(0.05, 1.0, 1.0, pulse(1.0, true))
        .unwrap()
        .with_boundary(BoundaryCondition::Neumann { minus: constant(0.1), plus: constant(-0.05) });
    let (sg, tg) = (SpaceGrid::new(1.0, 161).unwrap(), TimeGrid::covering(0.005, 1.0).unwrap());
    let solver = StumSolver::new(&p, sg, tg).unwrap();
    let field = solver.field(&solver.march().unwrap(), &[0.25, 0.5, 1.0]).unwrap();
    let o = FourierOracle::new(&p, 256).unwrap();
    for (j, &t) in field.times().iter().enumerate() {
        let exact = o.eval_many(field.xs(), t).unwrap();
        let peak = exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = field.snapshot(j).iter().zip(&exact).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / peak;
        assert!(err < 5e-2, "t = {t}: {err}");
    }
}

#[test]
fn dirichlet_time_varying_data_match_fdm() {
    let g: Func1 = Arc::new(|t: f64| (3.0 * t).sin());
    let p = DiffusionProblem::dirichlet(0.05, 1.0, 1.0, zero())
        .unwrap()
        .with_boundary(BoundaryCondition::Dirichlet { minus: g, plus: constant(0.0) });
    let (sg, tg) = (SpaceGrid::new(1.0, 40).unwrap(), TimeGrid::covering(0.01, 1.0).unwrap());
    let solver = StumSolver::new(&p, sg, tg).unwrap();
    let field = solver.field(&solver.march().unwrap(), &[0.5, 1.0]).unwrap();
    let fdm = fdm_reference(&p, 80, 2e-4, &[0.5, 1.0]).unwrap();
    for j in 0..2 {
        let reference: Vec<f64> = (0..40).map(|m| fdm.snapshot(j)[2 * m + 1]).collect();
        let peak = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = field.snapshot(j).iter().zip(&reference).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / peak;
        assert!(err < 2e-2, "{err}");
    }
}

#[test]
fn neumann_error_grows_with_dt() {
    let p = DiffusionProblem::neumann(0.05, 1.0, 1.0, pulse(1.0, true)).unwrap();
    let o = FourierOracle::new(&p, 128).unwrap();
    let sg = SpaceGrid::new(1.0, 161).unwrap();
    let errs: Vec<f64> = [0.005, 0.0125, 0.03125, 0.0625]
        .iter()
        .map(|&dt| {
            let solver = StumSolver::new(&p, sg, TimeGrid::covering(dt, 1.0).unwrap()).unwrap();
            let f = solver.field(&solver.march().unwrap(), &[1.0]).unwrap();
            let exact = o.eval_many(f.xs(), 1.0).unwrap();
            let peak = exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            f.snapshot(0).iter().zip(&exact).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / peak
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1] >= w[0]), "{errs:?}");
    assert!(errs[3] > 2.0 * errs[0]);
}

fn random_initial(amps: Vec<f64>, centres: Vec<f64>) -> Func1 {
    Arc::new(move |x: f64| amps.iter().zip(&centres).map(|(a, c)| a * (-((x - c) / 0.3).powi(2)).exp()).sum())
}

fn build(kind: u8, c0: Func1, data: [f64; 2]) -> DiffusionProblem {
    let bc = match kind {
        0 => BoundaryCondition::Dirichlet { minus: constant(data[0]), plus: constant(data[1]) },
        1 => BoundaryCondition::Neumann { minus: constant(data[0]), plus: constant(data[1]) },
        _ => BoundaryCondition::Robin {
            a_minus: constant(0.7),
            b_minus: constant(data[0]),
            a_plus: constant(1.3),
            b_plus: constant(data[1]),
        },
    };
    DiffusionProblem::new(0.05, 1.0, 1.0, c0, bc).unwrap()
}

fn close(a: &BoundaryHistory, b: &BoundaryHistory, scale: f64) -> bool {
    let mag = a.slabs().iter().chain(b.slabs()).fold(1.0f64, |m, s| {
        m.max(s.flux_minus.abs()).max(s.flux_plus.abs()).max(s.trace_minus.abs()).max(s.trace_plus.abs())
    });
    a.slabs().iter().zip(b.slabs()).all(|(x, y)| {
        (x.flux_minus * scale - y.flux_minus).abs() <= 1e-12 * mag
            && (x.flux_plus * scale - y.flux_plus).abs() <= 1e-12 * mag
            && (x.trace_minus * scale - y.trace_minus).abs() <= 1e-12 * mag
            && (x.trace_plus * scale - y.trace_plus).abs() <= 1e-12 * mag
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn marching_is_linear(
        kind in 0u8..3,
        amps in prop::collection::vec(-2.0f64..2.0, 3),
        centres in prop::collection::vec(-0.8f64..0.8, 3),
        data in prop::array::uniform2(-1.0f64..1.0),
        dt in 0.01f64..0.1,
        scale in -3.0f64..3.0,
    ) {
        let sg = SpaceGrid::new(1.0, 11).unwrap();
        let tg = TimeGrid::new(dt, 8).unwrap();
        let base = build(kind, random_initial(amps.clone(), centres.clone()), data);
        let scaled_amps: Vec<f64> = amps.iter().map(|a| a * scale).collect();
        let scaled = build(kind, random_initial(scaled_amps, centres), [data[0] * scale, data[1] * scale]);
        let h1 = march(&base, sg, tg).unwrap();
        let h2 = march(&scaled, sg, tg).unwrap();
        prop_assert!(close(&h1, &h2, scale));
    }

    #[test]
    fn marching_is_causal(
        kind in 0u8..3,
        amps in prop::collection::vec(-2.0f64..2.0, 3),
        centres in prop::collection::vec(-0.8f64..0.8, 3),
        data in prop::array::uniform2(-1.0f64..1.0),
        dt in 0.01f64..0.06,
    ) {
        let sg = SpaceGrid::new(1.0, 11).unwrap();
        let p = build(kind, random_initial(amps, centres), data);
        let short = march(&p, sg, TimeGrid::new(dt, 8).unwrap()).unwrap();
        let long = march(&p, sg, TimeGrid::new(dt, 16).unwrap()).unwrap();
        prop_assert_eq!(short.len(), 8);
        prop_assert_eq!(short.slabs(), &long.slabs()[..8]);
    }
}
