use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use srmc_bench::{heisenberg, prescribed};
use srmc_core::minimizer::{minimize_intrinsic, minimize_tgraph, tgraph_field, DEFAULT_EPS_SCHEDULE};
use srmc_core::{GraphDomain, GridField, Quadrature, SolveOptions};

fn intrinsic(c: &mut Criterion) {
    let g = heisenberg();
    let f = prescribed("0.5");
    let mut group = c.benchmark_group("minimize_intrinsic");
    group.sample_size(10);
    for n in [17usize, 33] {
        let field = GridField::with_boundary(GraphDomain::unit(), n, n, |x, t| 0.5 * x + 0.2 * t).unwrap();
        let q = Quadrature::aligned(&field.grid, 2);
        group.bench_with_input(BenchmarkId::from_parameter(n), &field, |b, field| {
            b.iter(|| minimize_intrinsic(field, &g, &f, &q, &SolveOptions::default()))
        });
    }
    group.finish();
}

fn tgraph(c: &mut Criterion) {
    let f = tgraph_field("0").unwrap();
    let mut group = c.benchmark_group("minimize_tgraph");
    group.sample_size(10);
    for n in [17usize, 33] {
        let field = GridField::with_boundary(GraphDomain::unit(), n, n, |x, y| 0.2 + 2.0 * x + 0.3 * y).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &field, |b, field| {
            b.iter(|| minimize_tgraph(field, &f, &DEFAULT_EPS_SCHEDULE, &SolveOptions::default()))
        });
    }
    group.finish();
}

criterion_group!(benches, intrinsic, tgraph);
criterion_main!(benches);
