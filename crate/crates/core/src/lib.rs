//! Prescribed mean curvature of intrinsic graphs in three-dimensional
//! contact sub-Riemannian manifolds, in a fixed Darboux chart.

pub mod area_variation;
pub mod contact_chart;
pub mod error;
pub mod fields;
pub mod foliation;
pub mod geodesics;
pub mod intrinsic_graph;
pub mod minimizer;
pub mod quadrature;
mod stencil;

pub use area_variation::{Bump, TestFunction, VariationReport};
pub use contact_chart::{ChartPoint, FrameMetric, HorizontalVec, MetricField};
pub use error::{Error, Result};
pub use fields::{Expr, ParseError, ScalarField, Var};
pub use foliation::{CharCurve, FoliationFamily};
pub use geodesics::{CharacteristicComparison, CurvatureProfile, HorizontalCurve};
pub use intrinsic_graph::{GraphDomain, GraphFunction, GraphPoint, GridData, Interpolation, Jet};
pub use minimizer::{GridField, SolveOptions, SolveReport};
pub use quadrature::{Quadrature, Rule};
