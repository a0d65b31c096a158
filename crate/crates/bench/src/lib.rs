//! Shared fixtures for the benchmarks.

use srmc_core::area_variation::curvature_field;
use srmc_core::{GraphDomain, GraphFunction, GridField, MetricField, ScalarField};

/// A smooth, non-critical graph over the unit square.
pub fn wavy_graph() -> GraphFunction {
    GraphFunction::from_expr("0.3*sin(2*t) + 0.2*x + 0.1*x*t", GraphDomain::unit()).expect("valid expression")
}

/// The same graph sampled on an `n × n` grid with spline interpolation.
pub fn wavy_grid(n: usize) -> GraphFunction {
    let u = wavy_graph();
    GridField::from_fn(GraphDomain::unit(), n, n, |x, t| u.value(x, t).expect("inside domain"))
        .expect("grid at least 3x3")
        .to_graph()
}

/// A non-constant metric with all three components varying.
pub fn curved_metric() -> MetricField {
    MetricField::from_sources("exp(0.4*y)", "0.1*sin(x)", "1 + 0.2*t^2").expect("valid metric")
}

pub fn heisenberg() -> MetricField {
    MetricField::heisenberg()
}

pub fn prescribed(src: &str) -> ScalarField {
    curvature_field(src).expect("valid curvature")
}
