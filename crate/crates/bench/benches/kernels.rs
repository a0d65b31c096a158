use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use srmc_bench::{curved_metric, heisenberg, prescribed, wavy_graph, wavy_grid};
use srmc_core::area_variation::{area, first_variation, fd_variation_oracle, geometric_first_variation, Bump};
use srmc_core::fields::{ScalarField, Var};
use srmc_core::foliation::{foliate_family, integrate_characteristic};
use srmc_core::geodesics::{integrate_geodesic, CurvatureProfile};
use srmc_core::{ChartPoint, Quadrature};

fn expressions(c: &mut Criterion) {
    let f = ScalarField::parse("exp(0.4*y) * sin(x*t) + sqrt(1 + x^2)", &[Var::X, Var::Y, Var::T]).unwrap();
    let mut group = c.benchmark_group("fields");
    group.bench_function("value", |b| b.iter(|| f.value_at(black_box(0.3), 0.2, 0.7, 0.0)));
    group.bench_function("dual", |b| b.iter(|| f.dual_at(black_box(0.3), 0.2, 0.7, 0.0)));
    group.finish();
}

fn area_and_variation(c: &mut Criterion) {
    let u = wavy_graph();
    let g = curved_metric();
    let f = prescribed("0.3 + 0.1*x");
    let v = Bump::new(0.5, 0.5, 0.3, 0.3);
    let mut group = c.benchmark_group("area");
    for cells in [16usize, 32, 64] {
        let q = Quadrature::gauss(4, cells, cells);
        group.bench_with_input(BenchmarkId::new("expr", cells), &q, |b, q| b.iter(|| area(&u, &g, q)));
    }
    let grid = wavy_grid(33);
    let q = Quadrature::gauss(4, 32, 32);
    group.bench_function("spline33", |b| b.iter(|| area(&grid, &g, &q)));
    group.finish();

    let mut group = c.benchmark_group("first_variation");
    group.sample_size(20);
    group.bench_function("formula", |b| b.iter(|| first_variation(&u, &v, &f, &g, &q)));
    group.bench_function("oracle", |b| b.iter(|| fd_variation_oracle(&u, &v, &f, &g, &q, 1e-4)));
    group.bench_function("geometric", |b| b.iter(|| geometric_first_variation(&u, &v, &f, &g, &q)));
    group.finish();
}

fn curves(c: &mut Criterion) {
    let h = heisenberg();
    let g = curved_metric();
    let one = CurvatureProfile::Constant(1.0);
    let mut group = c.benchmark_group("geodesic");
    for (name, metric) in [("heisenberg", &h), ("curved", &g)] {
        group.bench_function(name, |b| {
            b.iter(|| integrate_geodesic(metric, ChartPoint::new(0.0, 0.0, 0.0), 0.0, &one, 1.0, 1e-3))
        });
    }
    group.finish();

    let u = wavy_graph();
    let eps = [-2e-3, -1e-3, 0.0, 1e-3, 2e-3];
    let mut group = c.benchmark_group("characteristic");
    group.bench_function("single", |b| b.iter(|| integrate_characteristic(&u, (0.5, 0.5), (0.0, 1.0), 1e-3)));
    group.bench_function("family5", |b| b.iter(|| foliate_family(&u, 0.5, 0.5, &eps, (0.0, 1.0), 1e-3)));
    group.finish();
}

criterion_group!(benches, expressions, area_and_variation, curves);
criterion_main!(benches);
