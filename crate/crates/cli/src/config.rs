//! JSON run configuration and its conversion into core objects.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use srmc_core::area_variation::curvature_field;
use srmc_core::minimizer::{tgraph_field, DEFAULT_EPS_SCHEDULE};
use srmc_core::{
    CurvatureProfile, GraphDomain, GraphFunction, Interpolation, MetricField, Quadrature, ScalarField, SolveOptions,
};

use crate::error::CliError;
use crate::grid_csv;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub metric: MetricSpec,
    #[serde(default = "zero_graph")]
    pub u: GraphSpec,
    #[serde(default = "zero_source")]
    pub f: String,
    #[serde(default)]
    pub domain: DomainSpec,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    /// Sampling grid for per-point CSV output of `area`.
    #[serde(default = "default_samples")]
    pub samples: [usize; 2],
    #[serde(default)]
    pub variation: VariationSpec,
    #[serde(default)]
    pub foliate: FoliateSpec,
    #[serde(default)]
    pub geodesic: GeodesicSpec,
    #[serde(default)]
    pub curvature: CurvatureSpec,
    #[serde(default)]
    pub minimize: MinimizeSpec,
    #[serde(default)]
    pub check: CheckSpec,
}

/// A preset name or the three frame components as expressions in `x, y, t`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Preset(String),
    Components { g11: String, g12: String, g22: String },
}

impl Default for MetricSpec {
    fn default() -> Self {
        MetricSpec::Preset("heisenberg".into())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSpec {
    Expr(String),
    Grid {
        grid: PathBuf,
        #[serde(default)]
        interpolation: InterpolationSpec,
    },
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpolationSpec {
    Bilinear,
    Bicubic,
    #[default]
    Spline,
}

impl From<InterpolationSpec> for Interpolation {
    fn from(s: InterpolationSpec) -> Self {
        match s {
            InterpolationSpec::Bilinear => Interpolation::Bilinear,
            InterpolationSpec::Bicubic => Interpolation::Bicubic,
            InterpolationSpec::Spline => Interpolation::Spline,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub x: [f64; 2],
    pub t: [f64; 2],
}

impl Default for DomainSpec {
    fn default() -> Self {
        DomainSpec { x: [0.0, 1.0], t: [0.0, 1.0] }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum RuleSpec {
    Gauss,
    Midpoint,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rule: RuleSpec,
    pub order: usize,
    pub cells: [usize; 2],
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rule: RuleSpec::Gauss,
            order: 4,
            cells: [64, 64],
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationSpec {
    /// Bumps per side of the test lattice.
    pub bumps: usize,
    pub fill: f64,
    pub fd_step: f64,
}

impl Default for VariationSpec {
    fn default() -> Self {
        VariationSpec {
            bumps: 3,
            fill: 0.9,
            fd_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FoliateSpec {
    /// Base points `(a, b)`; defaults to the domain centre.
    pub seeds: Option<Vec<[f64; 2]>>,
    /// Offsets `ε` of the family members, strictly increasing.
    pub eps: Option<Vec<f64>>,
    /// Parameter range; defaults to the `x` extent of the domain.
    pub s_range: Option<[f64; 2]>,
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeodesicSpec {
    pub start: [f64; 3],
    pub theta: f64,
    /// Curvature as an expression in `s`.
    pub h: String,
    pub length: f64,
    pub step: f64,
}

impl Default for GeodesicSpec {
    fn default() -> Self {
        GeodesicSpec {
            start: [0.0; 3],
            theta: 0.0,
            h: "0".into(),
            length: 1.0,
            step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurvatureSpec {
    /// Seeds in the parameter plane; defaults to three interior points.
    pub seeds: Option<Vec<[f64; 2]>>,
    pub length: f64,
    pub step: f64,
}

impl Default for CurvatureSpec {
    fn default() -> Self {
        CurvatureSpec {
            seeds: None,
            length: 0.3,
            step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinimizeSpec {
    pub nodes: [usize; 2],
    pub max_steps: usize,
    pub tolerance: f64,
    pub initial_rate: f64,
    /// Gauss order per cell for the intrinsic energy.
    pub order: usize,
    pub eps_schedule: Vec<f64>,
    /// Boundary values of the t-graph as an expression in `x, y`.
    pub boundary: String,
}

impl Default for MinimizeSpec {
    fn default() -> Self {
        let o = SolveOptions::default();
        MinimizeSpec {
            nodes: [33, 33],
            max_steps: o.max_steps,
            tolerance: o.tolerance,
            initial_rate: o.initial_rate,
            order: 2,
            eps_schedule: DEFAULT_EPS_SCHEDULE.to_vec(),
            boundary: "0".into(),
        }
    }
}

impl MinimizeSpec {
    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            max_steps: self.max_steps,
            tolerance: self.tolerance,
            initial_rate: self.initial_rate,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSpec {
    pub variation_rel: f64,
    pub variation_abs: f64,
    /// Sup distance between characteristics and geodesics of curvature `H`.
    pub geodesic: f64,
    /// Sup of `|H − f|` along characteristics.
    pub curvature: f64,
}

impl Default for CheckSpec {
    fn default() -> Self {
        CheckSpec {
            variation_rel: 1e-5,
            variation_abs: 1e-8,
            geodesic: 1e-6,
            curvature: 1e-6,
        }
    }
}

fn zero_source() -> String {
    "0".into()
}

fn zero_graph() -> GraphSpec {
    GraphSpec::Expr(zero_source())
}

fn default_samples() -> [usize; 2] {
    [33, 33]
}

/// A parsed configuration together with the raw bytes it came from.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: Config,
    pub raw: Vec<u8>,
    pub base_dir: PathBuf,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let raw = std::fs::read(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    let config: Config = serde_json::from_slice(&raw)
        .map_err(|e| CliError::Validation(format!("invalid config {}: {e}", path.display())))?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { config, raw, base_dir })
}

fn field_error(field: &str, e: srmc_core::Error) -> CliError {
    CliError::Validation(format!("config field `{field}`: {e}"))
}

/// Core objects built from a configuration. Every expression is parsed and
/// every referenced file read here, so validation errors surface before
/// any computation starts.
pub struct Problem {
    pub metric: MetricField,
    pub domain: GraphDomain,
    pub u: GraphFunction,
    pub f: ScalarField,
    pub quadrature: Quadrature,
}

impl Loaded {
    pub fn domain(&self) -> Result<GraphDomain, CliError> {
        let d = self.config.domain;
        GraphDomain::new(d.x[0], d.x[1], d.t[0], d.t[1]).map_err(|e| field_error("domain", e))
    }

    pub fn metric(&self) -> Result<MetricField, CliError> {
        match &self.config.metric {
            MetricSpec::Preset(name) => MetricField::preset(name)
                .ok_or_else(|| CliError::Validation(format!("config field `metric`: unknown preset `{name}`"))),
            MetricSpec::Components { g11, g12, g22 } => {
                MetricField::from_sources(g11, g12, g22).map_err(|e| field_error("metric", e))
            }
        }
    }

    pub fn quadrature(&self) -> Result<Quadrature, CliError> {
        let q = self.config.quadrature;
        if q.cells[0] == 0 || q.cells[1] == 0 {
            return Err(CliError::Validation("config field `quadrature`: cells must be positive".into()));
        }
        Ok(match q.rule {
            RuleSpec::Gauss => {
                if !(1..=32).contains(&q.order) {
                    return Err(CliError::Validation(format!(
                        "config field `quadrature`: order must be in 1..=32, got {}",
                        q.order
                    )));
                }
                Quadrature::gauss(q.order, q.cells[0], q.cells[1])
            }
            RuleSpec::Midpoint => Quadrature::midpoint(q.cells[0], q.cells[1]),
        })
    }

    pub fn graph(&self, domain: GraphDomain) -> Result<GraphFunction, CliError> {
        match &self.config.u {
            GraphSpec::Expr(src) => GraphFunction::from_expr(src, domain).map_err(|e| field_error("u", e)),
            GraphSpec::Grid { grid, interpolation } => {
                let path = self.base_dir.join(grid);
                let data = grid_csv::read(&path)?.with_interpolation((*interpolation).into());
                Ok(GraphFunction::from_grid(data))
            }
        }
    }

    pub fn prescribed(&self) -> Result<ScalarField, CliError> {
        curvature_field(&self.config.f).map_err(|e| field_error("f", e))
    }

    /// `f` read as a function of `(x, y)` for the t-graph functional.
    pub fn prescribed_tgraph(&self) -> Result<ScalarField, CliError> {
        tgraph_field(&self.config.f).map_err(|e| field_error("f", e))
    }

    pub fn tgraph_boundary(&self) -> Result<ScalarField, CliError> {
        tgraph_field(&self.config.minimize.boundary).map_err(|e| field_error("minimize.boundary", e))
    }

    pub fn profile(&self) -> Result<CurvatureProfile, CliError> {
        CurvatureProfile::parse(&self.config.geodesic.h).map_err(|e| field_error("geodesic.h", e))
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        let domain = self.domain()?;
        Ok(Problem {
            metric: self.metric()?,
            u: self.graph(domain)?,
            f: self.prescribed()?,
            quadrature: self.quadrature()?,
            domain,
        })
    }

    /// Parameter-plane seeds for curvature and check runs.
    pub fn seeds(&self, domain: &GraphDomain) -> Vec<(f64, f64)> {
        match &self.config.curvature.seeds {
            Some(s) => s.iter().map(|p| (p[0], p[1])).collect(),
            None => [(0.3, 0.3), (0.5, 0.5), (0.3, 0.7)]
                .iter()
                .map(|&(a, b)| {
                    (
                        domain.x0 + a * (domain.x1 - domain.x0),
                        domain.t0 + b * (domain.t1 - domain.t0),
                    )
                })
                .collect(),
        }
    }
}
