//! Descent solvers for prescribed-curvature problems on node grids.
//!
//! Intrinsic graphs: `E(u) = A(u) − V(u)` with
//! `V(u) = ∫_D ∫_0^{u(x,t)} f det(G) (x, w, t − x w) dw dx dt`, so that
//! `δV[v] = ∫ f det(G) v`. `u` is bilinear on each cell and integrated by
//! a per-cell Gauss rule; the gradient is the weak form of the first
//! variation against the nodal hat functions.
//!
//! t-graphs: `F(v) = ∫_Ω sqrt(|∇v + (−y, x)|² + ε²) + ∫_Ω f v`, with the
//! gradient sampled at cell corners from the adjacent cell edges and a
//! trapezoidal sum.
//!
//! Both use gradient steps preconditioned by the inverse grid Laplacian,
//! with Barzilai–Borwein trial lengths and Armijo backtracking.

use rayon::prelude::*;

use crate::area_variation::coefficients_at;
use crate::contact_chart::MetricField;
use crate::error::{Error, Result};
use crate::fields::{ScalarField, Var};
use crate::intrinsic_graph::{embed_jet, GraphDomain, GraphFunction, GraphPoint, GridData, Interpolation, Jet};
use crate::quadrature::{gauss_legendre, pairwise_sum, Quadrature, Rule};

/// Node samples on a rectangle; the boundary ring is Dirichlet data and is
/// never modified by the solvers. For t-graphs the second axis is `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: GridData,
}

impl GridField {
    pub fn new(grid: GridData) -> Result<Self> {
        if grid.nx < 3 || grid.nt < 3 {
            return Err(Error::InvalidArgument(format!(
                "a {}x{} grid has no interior nodes",
                grid.nx, grid.nt
            )));
        }
        Ok(GridField { grid })
    }

    /// Samples `f` at every node.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(d: GraphDomain, nx: usize, nt: usize, f: F) -> Result<Self> {
        let probe = GridData::new(d, nx, nt, vec![0.0; nx * nt])?;
        let values = (0..nx)
            .flat_map(|i| (0..nt).map(move |j| (i, j)))
            .map(|(i, j)| {
                let (x, t) = probe.node(i, j);
                f(x, t)
            })
            .collect();
        Self::new(GridData::new(d, nx, nt, values)?)
    }

    /// Boundary ring from `f`, interior zero.
    pub fn with_boundary<F: Fn(f64, f64) -> f64>(d: GraphDomain, nx: usize, nt: usize, f: F) -> Result<Self> {
        let mut field = Self::from_fn(d, nx, nt, f)?;
        for i in 1..nx - 1 {
            for j in 1..nt - 1 {
                field.grid.values[i * nt + j] = 0.0;
            }
        }
        Ok(field)
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.grid.nx || j + 1 == self.grid.nt
    }

    /// C² spline interpolant of the nodes as a graph function.
    pub fn to_graph(&self) -> GraphFunction {
        GraphFunction::from_grid(self.grid.clone().with_interpolation(Interpolation::Spline))
    }

    /// `max |value − f(node)|` over all nodes.
    pub fn max_deviation<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let g = &self.grid;
        (0..g.nx)
            .flat_map(|i| (0..g.nt).map(move |j| (i, j)))
            .map(|(i, j)| {
                let (x, t) = g.node(i, j);
                (g.at(i, j) - f(x, t)).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Accepted steps allowed per stage.
    pub max_steps: usize,
    /// Stop once the residual falls to this value.
    pub tolerance: f64,
    /// First trial step length (in preconditioned units).
    pub initial_rate: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_steps: 5000,
            tolerance: 1e-7,
            initial_rate: 1.0,
        }
    }
}

pub const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Energy before the first step and after every accepted step.
    pub energy_history: Vec<f64>,
    /// Index into `energy_history` where each ε stage begins.
    pub stage_starts: Vec<usize>,
    pub eps_schedule: Vec<f64>,
    /// `max_k |∂E/∂u_k| / ∫ φ_k` over interior nodes: the first variation
    /// against each hat function per unit test mass.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SolveReport {
    /// Energy never increased within a stage.
    pub fn is_monotone(&self) -> bool {
        let mut bounds = self.stage_starts.clone();
        bounds.push(self.energy_history.len());
        bounds
            .windows(2)
            .all(|w| self.energy_history[w[0]..w[1]].windows(2).all(|e| e[1] <= e[0]))
    }
}

trait Objective: Sync {
    fn shape(&self) -> (usize, usize);
    fn spacing(&self) -> (f64, f64);
    fn energy(&self, v: &[f64]) -> Result<f64>;
    fn gradient(&self, v: &[f64]) -> Result<(f64, Vec<f64>)>;
}

/// Inverse of the five-point Dirichlet Laplacian scaled by the cell area,
/// by sine transforms on the interior nodes.
struct Preconditioner {
    nx: usize,
    nt: usize,
    sx: Vec<f64>,
    st: Vec<f64>,
    lx: Vec<f64>,
    lt: Vec<f64>,
    scale: f64,
}

impl Preconditioner {
    fn new(nx: usize, nt: usize, hx: f64, ht: f64) -> Self {
        let (mx, mt) = (nx - 2, nt - 2);
        let sines = |m: usize| -> Vec<f64> {
            (0..m * m)
                .map(|k| {
                    let (a, b) = (k / m + 1, k % m + 1);
                    (std::f64::consts::PI * (a * b) as f64 / (m + 1) as f64).sin()
                })
                .collect()
        };
        let eig = |m: usize, h: f64| -> Vec<f64> {
            (1..=m)
                .map(|k| (2.0 - 2.0 * (std::f64::consts::PI * k as f64 / (m + 1) as f64).cos()) / (h * h))
                .collect()
        };
        Preconditioner {
            nx: mx,
            nt: mt,
            sx: sines(mx),
            st: sines(mt),
            lx: eig(mx, hx),
            lt: eig(mt, ht),
            scale: 4.0 / ((mx + 1) * (mt + 1)) as f64 / (hx * ht),
        }
    }

    /// Interior-only vector in, interior-only vector out.
    fn apply(&self, r: &[f64]) -> Vec<f64> {
        let (mx, mt) = (self.nx, self.nt);
        let transform = |v: &[f64]| -> Vec<f64> {
            // rows then columns: out = Sx v St
            let mut tmp = vec![0.0; mx * mt];
            for a in 0..mx {
                for j in 0..mt {
                    let mut acc = 0.0;
                    for i in 0..mx {
                        acc += self.sx[a * mx + i] * v[i * mt + j];
                    }
                    tmp[a * mt + j] = acc;
                }
            }
            let mut out = vec![0.0; mx * mt];
            for a in 0..mx {
                for b in 0..mt {
                    let mut acc = 0.0;
                    for j in 0..mt {
                        acc += tmp[a * mt + j] * self.st[j * mt + b];
                    }
                    out[a * mt + b] = acc;
                }
            }
            out
        };
        let mut hat = transform(r);
        for a in 0..mx {
            for b in 0..mt {
                hat[a * mt + b] /= self.lx[a] + self.lt[b];
            }
        }
        transform(&hat).into_iter().map(|v| v * self.scale).collect()
    }
}

fn interior(v: &[f64], nx: usize, nt: usize) -> Vec<f64> {
    (1..nx - 1)
        .flat_map(|i| (1..nt - 1).map(move |j| v[i * nt + j]))
        .collect()
}

fn residual_of(grad: &[f64], nx: usize, nt: usize, hx: f64, ht: f64) -> f64 {
    interior(grad, nx, nt).iter().fold(0.0_f64, |m, g| m.max(g.abs())) / (hx * ht)
}

struct Outcome {
    iterations: usize,
    converged: bool,
    residual: f64,
}

fn descend<O: Objective>(obj: &O, v: &mut [f64], opts: &SolveOptions, history: &mut Vec<f64>) -> Result<Outcome> {
    let (nx, nt) = obj.shape();
    let (hx, ht) = obj.spacing();
    let pre = Preconditioner::new(nx, nt, hx, ht);
    let (mut e, mut grad) = obj.gradient(v)?;
    history.push(e);
    let mut rate = opts.initial_rate;
    let mut iterations = 0;
    loop {
        let residual = residual_of(&grad, nx, nt, hx, ht);
        if !residual.is_finite() {
            return Err(Error::Degenerate("non-finite gradient".into()));
        }
        if residual <= opts.tolerance {
            return Ok(Outcome {
                iterations,
                converged: true,
                residual,
            });
        }
        if iterations >= opts.max_steps {
            return Ok(Outcome {
                iterations,
                converged: false,
                residual,
            });
        }
        let g_in = interior(&grad, nx, nt);
        let d: Vec<f64> = pre.apply(&g_in).into_iter().map(|p| -p).collect();
        let slope: f64 = g_in.iter().zip(&d).map(|(a, b)| a * b).sum();
        let mut a = rate;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial = step(v, &d, a, nx, nt);
            match obj.energy(&trial) {
                Ok(et) if et <= e + ARMIJO * a * slope => {
                    accepted = Some((trial, et));
                    break;
                }
                Ok(_) | Err(Error::NotPositiveDefinite { .. }) => a *= 0.5,
                Err(err) => return Err(err),
            }
        }
        let Some((trial, et)) = accepted else {
            // no decrease representable in floating point
            return Ok(Outcome {
                iterations,
                converged: false,
                residual,
            });
        };
        let (_, g_new) = obj.gradient(&trial)?;
        let y: Vec<f64> = interior(&g_new, nx, nt)
            .iter()
            .zip(&g_in)
            .map(|(n, o)| n - o)
            .collect();
        let sy: f64 = d.iter().zip(&y).map(|(di, yi)| a * di * yi).sum();
        rate = if sy > 0.0 {
            (-a * a * slope / sy).clamp(1e-8, 1e8)
        } else {
            (2.0 * a).min(1e8)
        };
        v.copy_from_slice(&trial);
        e = et;
        grad = g_new;
        history.push(e);
        iterations += 1;
    }
}

fn step(v: &[f64], d: &[f64], a: f64, nx: usize, nt: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    let mut k = 0;
    for i in 1..nx - 1 {
        for j in 1..nt - 1 {
            out[i * nt + j] += a * d[k];
            k += 1;
        }
    }
    out
}

fn gauss_order(quad: &Quadrature) -> Result<usize> {
    match quad.rule {
        Rule::Midpoint => Ok(1),
        Rule::GaussLegendre(n) if (1..=32).contains(&n) => Ok(n),
        Rule::GaussLegendre(n) => Err(Error::InvalidArgument(format!(
            "Gauss-Legendre order {n} not in 1..=32"
        ))),
    }
}

const FIBER_ORDER: usize = 8;

struct Intrinsic<'a> {
    domain: GraphDomain,
    nx: usize,
    nt: usize,
    g: &'a MetricField,
    f: &'a ScalarField,
    rule: Vec<(f64, f64)>,
    fiber: Vec<(f64, f64)>,
    /// `f det(G)` when both are constant.
    density: Option<f64>,
}

impl<'a> Intrinsic<'a> {
    fn new(field: &GridField, g: &'a MetricField, f: &'a ScalarField, quad: &Quadrature) -> Result<Self> {
        let unit = |n: usize| -> Vec<(f64, f64)> {
            gauss_legendre(n)
                .into_iter()
                .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
                .collect()
        };
        let density = match (f.as_constant(), g.is_constant()) {
            (Some(0.0), _) => Some(0.0),
            (Some(c), true) => Some(c * g.at(&crate::contact_chart::ChartPoint::new(0.0, 0.0, 0.0))?.det()),
            _ => None,
        };
        Ok(Intrinsic {
            domain: field.grid.domain,
            nx: field.grid.nx,
            nt: field.grid.nt,
            g,
            f,
            rule: unit(gauss_order(quad)?),
            fiber: unit(FIBER_ORDER),
            density,
        })
    }

    /// `∫_0^u f det(G)` along the fibre over `(x, t)`.
    fn volume(&self, x: f64, t: f64, u: f64) -> Result<f64> {
        if let Some(c) = self.density {
            return Ok(c * u);
        }
        let mut acc = 0.0;
        for &(s, w) in &self.fiber {
            let p = embed_jet(x, t, s * u);
            let m = self.g.at(&p)?;
            acc += w * self.f.value_at(p.x, p.y, p.t, 0.0)? * m.det();
        }
        Ok(acc * u)
    }

    fn cell(&self, v: &[f64], ci: usize, cj: usize, with_grad: bool) -> Result<(f64, [f64; 4])> {
        let (hx, ht) = self.spacing();
        let nt = self.nt;
        let c = [
            v[ci * nt + cj],
            v[(ci + 1) * nt + cj],
            v[ci * nt + cj + 1],
            v[(ci + 1) * nt + cj + 1],
        ];
        let mut energy = Vec::with_capacity(self.rule.len() * self.rule.len());
        let mut grad = [0.0; 4];
        for &(sx, wx) in &self.rule {
            for &(st, wt) in &self.rule {
                let phi = [(1.0 - sx) * (1.0 - st), sx * (1.0 - st), (1.0 - sx) * st, sx * st];
                let phx = [-(1.0 - st) / hx, (1.0 - st) / hx, -st / hx, st / hx];
                let pht = [-(1.0 - sx) / ht, -sx / ht, (1.0 - sx) / ht, sx / ht];
                let jet = Jet {
                    u: (0..4).map(|k| c[k] * phi[k]).sum(),
                    ux: (0..4).map(|k| c[k] * phx[k]).sum(),
                    ut: (0..4).map(|k| c[k] * pht[k]).sum(),
                };
                let x = self.domain.x0 + (ci as f64 + sx) * hx;
                let t = self.domain.t0 + (cj as f64 + st) * ht;
                let gp = GraphPoint::from_jet(self.g, (x, t), jet)?;
                let w = wx * wt * hx * ht;
                energy.push(w * (gp.area_element - self.volume(x, t, jet.u)?));
                if with_grad {
                    let co = coefficients_at(&gp, self.f)?;
                    for k in 0..4 {
                        grad[k] += w * (co.k * phi[k] + co.m * (phx[k] + jet.u * pht[k] + jet.ut * phi[k]));
                    }
                }
            }
        }
        Ok((pairwise_sum(&energy), grad))
    }

    fn assemble(&self, v: &[f64], with_grad: bool) -> Result<(f64, Vec<f64>)> {
        let (nx, nt) = (self.nx, self.nt);
        let cells: Vec<(f64, [f64; 4])> = (0..(nx - 1) * (nt - 1))
            .into_par_iter()
            .map(|k| self.cell(v, k / (nt - 1), k % (nt - 1), with_grad))
            .collect::<Result<_>>()?;
        let energy = pairwise_sum(&cells.iter().map(|c| c.0).collect::<Vec<_>>());
        let mut grad = vec![0.0; if with_grad { nx * nt } else { 0 }];
        if with_grad {
            for (k, (_, g)) in cells.iter().enumerate() {
                let (ci, cj) = (k / (nt - 1), k % (nt - 1));
                grad[ci * nt + cj] += g[0];
                grad[(ci + 1) * nt + cj] += g[1];
                grad[ci * nt + cj + 1] += g[2];
                grad[(ci + 1) * nt + cj + 1] += g[3];
            }
        }
        Ok((energy, grad))
    }
}

impl Objective for Intrinsic<'_> {
    fn shape(&self) -> (usize, usize) {
        (self.nx, self.nt)
    }

    fn spacing(&self) -> (f64, f64) {
        (
            (self.domain.x1 - self.domain.x0) / (self.nx - 1) as f64,
            (self.domain.t1 - self.domain.t0) / (self.nt - 1) as f64,
        )
    }

    fn energy(&self, v: &[f64]) -> Result<f64> {
        Ok(self.assemble(v, false)?.0)
    }

    fn gradient(&self, v: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.assemble(v, true)
    }
}

/// `A(u) − V(u)` for the bilinear interpolant of `field`, with the Gauss
/// order of `quad` applied on every grid cell.
pub fn energy_intrinsic(field: &GridField, g: &MetricField, f: &ScalarField, quad: &Quadrature) -> Result<f64> {
    Intrinsic::new(field, g, f, quad)?.energy(&field.grid.values)
}

/// `∂E/∂u_k` for every node (boundary entries included).
pub fn gradient_intrinsic(
    field: &GridField,
    g: &MetricField,
    f: &ScalarField,
    quad: &Quadrature,
) -> Result<Vec<f64>> {
    Ok(Intrinsic::new(field, g, f, quad)?.gradient(&field.grid.values)?.1)
}

/// Preconditioned descent on [`energy_intrinsic`] with the boundary ring
/// fixed. Running out of steps is reported through `converged`.
pub fn minimize_intrinsic(
    field: &GridField,
    g: &MetricField,
    f: &ScalarField,
    quad: &Quadrature,
    opts: &SolveOptions,
) -> Result<(GridField, SolveReport)> {
    let obj = Intrinsic::new(field, g, f, quad)?;
    let mut v = field.grid.values.clone();
    let mut history = Vec::new();
    let out = descend(&obj, &mut v, opts, &mut history)?;
    let mut result = field.clone();
    result.grid.values = v;
    Ok((
        result,
        SolveReport {
            energy_history: history,
            stage_starts: vec![0],
            eps_schedule: Vec::new(),
            residual: out.residual,
            iterations: out.iterations,
            converged: out.converged,
        },
    ))
}

/// Prescribed term of the t-graph functional, `f(x, y)`.
pub fn tgraph_field(source: &str) -> Result<ScalarField> {
    Ok(ScalarField::parse(source, &[Var::X, Var::Y])?)
}

struct TGraph {
    domain: GraphDomain,
    nx: usize,
    ny: usize,
    f: Vec<f64>,
    eps: f64,
}

impl TGraph {
    fn new(field: &GridField, f: &ScalarField, eps: f64) -> Result<Self> {
        if !(eps >= 0.0) {
            return Err(Error::InvalidArgument(format!("ε must be non-negative, got {eps}")));
        }
        if f.expr().variables().iter().any(|v| !matches!(v, Var::X | Var::Y)) {
            return Err(Error::InvalidArgument(
                "the t-graph term f may depend on x and y only".into(),
            ));
        }
        let grid = &field.grid;
        let (hx, hy) = grid.spacing();
        let mut weights = Vec::with_capacity(grid.nx * grid.nt);
        for i in 0..grid.nx {
            for j in 0..grid.nt {
                let (x, y) = grid.node(i, j);
                let wx = if i == 0 || i + 1 == grid.nx { 0.5 } else { 1.0 };
                let wy = if j == 0 || j + 1 == grid.nt { 0.5 } else { 1.0 };
                weights.push(wx * wy * hx * hy * f.value_at(x, y, 0.0, 0.0)?);
            }
        }
        Ok(TGraph {
            domain: grid.domain,
            nx: grid.nx,
            ny: grid.nt,
            f: weights,
            eps,
        })
    }

    fn assemble(&self, v: &[f64], with_grad: bool) -> (f64, Vec<f64>) {
        let (nx, ny) = (self.nx, self.ny);
        let (hx, hy) = self.spacing();
        let eps2 = self.eps * self.eps;
        let cells: Vec<(f64, [f64; 4])> = (0..(nx - 1) * (ny - 1))
            .into_par_iter()
            .map(|k| {
                let (ci, cj) = (k / (ny - 1), k % (ny - 1));
                let at = |a: usize, b: usize| v[(ci + a) * ny + cj + b];
                let mut e = [0.0; 4];
                let mut g = [0.0; 4];
                // corner index: a + 2 b for (ci + a, cj + b)
                for b in 0..2 {
                    for a in 0..2 {
                        let x = self.domain.x0 + (ci + a) as f64 * hx;
                        let y = self.domain.t0 + (cj + b) as f64 * hy;
                        let dx = (at(1, b) - at(0, b)) / hx - y;
                        let dy = (at(a, 1) - at(a, 0)) / hy + x;
                        let phi = (dx * dx + dy * dy + eps2).sqrt();
                        e[a + 2 * b] = phi;
                        if with_grad {
                            let (nx_, ny_) = (dx / phi, dy / phi);
                            g[1 + 2 * b] += nx_ / hx;
                            g[2 * b] -= nx_ / hx;
                            g[a + 2] += ny_ / hy;
                            g[a] -= ny_ / hy;
                        }
                    }
                }
                let w = 0.25 * hx * hy;
                (w * (e[0] + e[1] + e[2] + e[3]), g.map(|x| w * x))
            })
            .collect();
        let mut terms: Vec<f64> = cells.iter().map(|c| c.0).collect();
        terms.extend(self.f.iter().zip(v).map(|(w, x)| w * x));
        let energy = pairwise_sum(&terms);
        if !with_grad {
            return (energy, Vec::new());
        }
        let mut grad = self.f.clone();
        for (k, (_, g)) in cells.iter().enumerate() {
            let (ci, cj) = (k / (ny - 1), k % (ny - 1));
            grad[ci * ny + cj] += g[0];
            grad[(ci + 1) * ny + cj] += g[1];
            grad[ci * ny + cj + 1] += g[2];
            grad[(ci + 1) * ny + cj + 1] += g[3];
        }
        (energy, grad)
    }
}

impl Objective for TGraph {
    fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    fn spacing(&self) -> (f64, f64) {
        (
            (self.domain.x1 - self.domain.x0) / (self.nx - 1) as f64,
            (self.domain.t1 - self.domain.t0) / (self.ny - 1) as f64,
        )
    }

    fn energy(&self, v: &[f64]) -> Result<f64> {
        Ok(self.assemble(v, false).0)
    }

    fn gradient(&self, v: &[f64]) -> Result<(f64, Vec<f64>)> {
        Ok(self.assemble(v, true))
    }
}

/// `∫ sqrt(|∇v + (−y, x)|² + ε²) + ∫ f v` for the t-graph `t = v(x, y)`
/// sampled on `field` (second axis `y`).
pub fn energy_tgraph(field: &GridField, f: &ScalarField, eps: f64) -> Result<f64> {
    TGraph::new(field, f, eps)?.energy(&field.grid.values)
}

pub fn gradient_tgraph(field: &GridField, f: &ScalarField, eps: f64) -> Result<Vec<f64>> {
    Ok(TGraph::new(field, f, eps)?.gradient(&field.grid.values)?.1)
}

pub const DEFAULT_EPS_SCHEDULE: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Descent with ε-continuation over a strictly decreasing positive
/// schedule; each stage starts from the previous result. The reported
/// residual belongs to the last stage.
pub fn minimize_tgraph(
    field: &GridField,
    f: &ScalarField,
    schedule: &[f64],
    opts: &SolveOptions,
) -> Result<(GridField, SolveReport)> {
    if schedule.is_empty() || schedule.iter().any(|e| !(*e > 0.0)) || schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument(
            "ε schedule must be positive and strictly decreasing".into(),
        ));
    }
    let mut v = field.grid.values.clone();
    let mut history = Vec::new();
    let mut stage_starts = Vec::new();
    let mut iterations = 0;
    let mut last = None;
    for &eps in schedule {
        let obj = TGraph::new(field, f, eps)?;
        stage_starts.push(history.len());
        let out = descend(&obj, &mut v, opts, &mut history)?;
        iterations += out.iterations;
        last = Some(out);
    }
    let out = last.expect("schedule is non-empty");
    let mut result = field.clone();
    result.grid.values = v;
    Ok((
        result,
        SolveReport {
            energy_history: history,
            stage_starts,
            eps_schedule: schedule.to_vec(),
            residual: out.residual,
            iterations,
            converged: out.converged,
        },
    ))
}
