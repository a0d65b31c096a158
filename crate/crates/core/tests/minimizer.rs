use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use srmc_core::area_variation::{curvature_field, zero_curvature};
use srmc_core::contact_chart::MetricField;
use srmc_core::fields::ScalarField;
use srmc_core::foliation::{integrate_characteristic, smoothness_report};
use srmc_core::intrinsic_graph::GraphDomain;
use srmc_core::minimizer::*;
use srmc_core::quadrature::Quadrature;

fn q2() -> Quadrature {
    Quadrature::gauss(2, 1, 1)
}

fn solve(n: usize, f: &str, bnd: impl Fn(f64, f64) -> f64) -> (GridField, SolveReport) {
    let field = GridField::with_boundary(GraphDomain::unit(), n, n, bnd).unwrap();
    minimize_intrinsic(
        &field,
        &MetricField::heisenberg(),
        &curvature_field(f).unwrap(),
        &q2(),
        &SolveOptions::default(),
    )
    .unwrap()
}

#[test]
fn intrinsic_recovers_plane() {
    let plane = |x: f64, _: f64| 0.5 * x + 0.1;
    let (out, rep) = solve(33, "0", plane);
    assert!(rep.converged);
    assert!(rep.is_monotone());
    assert!(out.max_deviation(plane) <= 1e-3);
    // the boundary ring is untouched
    let g = &out.grid;
    for i in 0..g.nx {
        for j in [0, g.nt - 1] {
            let (x, t) = g.node(i, j);
            assert_eq!(g.at(i, j), plane(x, t));
        }
    }
}

#[test]
fn intrinsic_recovers_minimal_graph() {
    // W = u_x + u u_t vanishes identically for this u
    let exact = |x: f64, t: f64| (t + 0.5) / (x + 1.0);
    let (coarse, _) = solve(17, "0", exact);
    let (fine, rep) = solve(33, "0", exact);
    assert!(rep.converged && rep.is_monotone());
    let (ec, ef) = (coarse.max_deviation(exact), fine.max_deviation(exact));
    assert!(ef <= 1e-3);
    assert!(ec / ef >= 2.0, "{ec} -> {ef}");
}

#[test]
fn intrinsic_prescribed_curvature_residual() {
    let (_, rep) = solve(33, "0.5", |x, _| 0.5 * x);
    assert!(rep.is_monotone());
    assert!(rep.residual <= 1e-3);
}

fn random_interior(n: usize, seed: u64, bnd: impl Fn(f64, f64) -> f64) -> GridField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = GridField::from_fn(GraphDomain::unit(), n, n, bnd).unwrap();
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            field.grid.values[i * n + j] += rng.gen_range(-0.1..0.1);
        }
    }
    field
}

fn gradient_check(
    field: &GridField,
    energy: impl Fn(&GridField) -> f64,
    grad: &[f64],
    seed: u64,
) {
    let n = field.grid.nt;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-6;
    for _ in 0..10 {
        let (i, j) = (rng.gen_range(1..field.grid.nx - 1), rng.gen_range(1..n - 1));
        let k = i * n + j;
        let mut p = field.clone();
        p.grid.values[k] += h;
        let mut m = field.clone();
        m.grid.values[k] -= h;
        let fd = (energy(&p) - energy(&m)) / (2.0 * h);
        let rel = (fd - grad[k]).abs() / grad[k].abs().max(1e-300);
        assert!(rel <= 1e-5, "node ({i}, {j}): {} vs {fd}", grad[k]);
    }
}

#[test]
fn intrinsic_gradient_matches_finite_differences() {
    let cases: [(MetricField, ScalarField); 2] = [
        (MetricField::heisenberg(), curvature_field("0.5").unwrap()),
        (
            MetricField::from_sources("exp(2*y)", "0.1*x", "1 + 0.2*t").unwrap(),
            curvature_field("0.3*y + 0.2*x").unwrap(),
        ),
    ];
    for (seed, (g, f)) in cases.iter().enumerate() {
        let field = random_interior(9, seed as u64, |x, t| 0.3 * x + 0.2 * t);
        let grad = gradient_intrinsic(&field, g, f, &q2()).unwrap();
        gradient_check(&field, |u| energy_intrinsic(u, g, f, &q2()).unwrap(), &grad, 10 + seed as u64);
    }
}

#[test]
fn tgraph_gradient_matches_finite_differences() {
    let f = tgraph_field("1 + x*y").unwrap();
    let field = random_interior(11, 7, |x, y| x - y);
    for eps in [1e-1, 1e-3] {
        let grad = gradient_tgraph(&field, &f, eps).unwrap();
        gradient_check(&field, |v| energy_tgraph(v, &f, eps).unwrap(), &grad, 3);
    }
}

#[test]
fn tgraph_recovers_plane_with_refinement() {
    let z = tgraph_field("0").unwrap();
    let plane = |x: f64, y: f64| 0.2 + 2.0 * x + 0.3 * y;
    let mut errs = Vec::new();
    for n in [33, 65] {
        let field = GridField::with_boundary(GraphDomain::unit(), n, n, plane).unwrap();
        let (out, rep) = minimize_tgraph(&field, &z, &DEFAULT_EPS_SCHEDULE, &SolveOptions::default()).unwrap();
        assert!(rep.converged && rep.is_monotone());
        assert_eq!(rep.stage_starts.len(), 3);
        errs.push(out.max_deviation(plane));
    }
    assert!(errs[1] <= 1e-3);
    assert!(errs[0] / errs[1] >= 2.0, "{errs:?}");
}

#[test]
fn tgraph_zero_boundary_off_origin() {
    let z = tgraph_field("0").unwrap();
    let d = GraphDomain::new(1.0, 2.0, 1.0, 2.0).unwrap();
    let field = GridField::with_boundary(d, 33, 33, |_, _| 0.0).unwrap();
    let (_, rep) = minimize_tgraph(&field, &z, &DEFAULT_EPS_SCHEDULE, &SolveOptions::default()).unwrap();
    assert!(rep.residual <= 1e-3);
    assert!(rep.is_monotone());
}

#[test]
fn exhausted_budget_is_flagged() {
    let field = GridField::with_boundary(GraphDomain::unit(), 17, 17, |x, _| x).unwrap();
    let opts = SolveOptions {
        max_steps: 2,
        ..SolveOptions::default()
    };
    let (_, rep) = minimize_intrinsic(&field, &MetricField::heisenberg(), &zero_curvature(), &q2(), &opts).unwrap();
    assert!(!rep.converged);
    assert_eq!(rep.iterations, 2);
    assert_eq!(rep.energy_history.len(), 3);
}

#[test]
fn critical_graphs_have_curvature_f() {
    let h = MetricField::heisenberg();
    for (f, bnd) in [
        ("0.5", Box::new(|x: f64, _: f64| 0.5 * x) as Box<dyn Fn(f64, f64) -> f64>),
        ("0", Box::new(|x: f64, t: f64| 0.3 * x + 0.2 * (3.0 * t).sin())),
    ] {
        let fs = curvature_field(f).unwrap();
        let (out, rep) = solve(33, f, bnd);
        assert!(rep.converged);
        let u = out.to_graph();
        for seed in [(0.3, 0.3), (0.5, 0.5), (0.3, 0.7), (0.6, 0.4), (0.4, 0.6)] {
            let c = integrate_characteristic(&u, seed, (seed.0 - 0.2, seed.0 + 0.2), 1e-3).unwrap();
            let r = smoothness_report(&c, &u, &h, Some(&fs)).unwrap();
            let fv = fs.as_constant().unwrap();
            let gap = r.mean_curvature.iter().map(|v| (v - fv).abs()).fold(0.0, f64::max);
            assert!(gap <= 5e-2, "f = {f}, seed {seed:?}: |H - f| = {gap}");
            assert!(r.prescribed_residual.unwrap() <= 5e-2);
        }
    }
}
