//! Intrinsic graphs over the vertical plane `y = 0`.
//!
//! A function `u(x, t)` on a rectangle `D` defines the surface
//! `Φ(x, t) = (x, u, t − x u)`. Its tangents are `E1 = X + u_x Y − u T` and
//! `E2 = u_t Y + T`, and the horizontal tangent direction is
//! `Z̃ = X + W Y` with `W = u_x + u u_t`.

use std::sync::Arc;

use crate::contact_chart::{ChartPoint, FrameMetric, HorizontalVec, MetricField};
use crate::error::{Error, Result};
use crate::fields::{ScalarField, Var};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphDomain {
    pub x0: f64,
    pub x1: f64,
    pub t0: f64,
    pub t1: f64,
}

impl GraphDomain {
    pub fn new(x0: f64, x1: f64, t0: f64, t1: f64) -> Result<Self> {
        if !(x0 < x1 && t0 < t1) || ![x0, x1, t0, t1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "domain [{x0}, {x1}] x [{t0}, {t1}] is empty or not finite"
            )));
        }
        Ok(GraphDomain { x0, x1, t0, t1 })
    }

    pub fn unit() -> Self {
        GraphDomain {
            x0: 0.0,
            x1: 1.0,
            t0: 0.0,
            t1: 1.0,
        }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.t1 - self.t0)
    }

    fn slack(&self) -> (f64, f64) {
        (
            1e-12 * (self.x1 - self.x0).max(1.0),
            1e-12 * (self.t1 - self.t0).max(1.0),
        )
    }

    pub fn contains(&self, x: f64, t: f64) -> bool {
        let (sx, st) = self.slack();
        x >= self.x0 - sx && x <= self.x1 + sx && t >= self.t0 - st && t <= self.t1 + st
    }
}

/// Value and first partials of `u` at a parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub u: f64,
    pub ux: f64,
    pub ut: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    /// Lipschitz, partials constant across each cell in their own variable.
    Bilinear,
    /// Catmull–Rom tensor cubic; C¹ across cells.
    Bicubic,
    /// Tensor cubic spline with not-a-knot ends; C² across cells.
    Spline,
}

/// Samples `values[i * nt + j] = u(x_i, t_j)` on a uniform node grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridData {
    pub domain: GraphDomain,
    pub nx: usize,
    pub nt: usize,
    pub values: Vec<f64>,
    pub interpolation: Interpolation,
    splines: Option<Arc<(SplineBasis, SplineBasis)>>,
}

impl GridData {
    pub fn new(domain: GraphDomain, nx: usize, nt: usize, values: Vec<f64>) -> Result<Self> {
        if nx < 2 || nt < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2x2 nodes".into()));
        }
        if values.len() != nx * nt {
            return Err(Error::InvalidArgument(format!(
                "grid of {nx}x{nt} nodes needs {} values, got {}",
                nx * nt,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("grid contains non-finite values".into()));
        }
        Ok(GridData {
            domain,
            nx,
            nt,
            values,
            interpolation: Interpolation::Bilinear,
            splines: None,
        })
    }

    pub fn with_interpolation(mut self, interpolation: Interpolation) -> Self {
        self.interpolation = interpolation;
        self.splines = match interpolation {
            Interpolation::Spline => Some(Arc::new((SplineBasis::new(self.nx), SplineBasis::new(self.nt)))),
            _ => None,
        };
        self
    }

    pub fn spacing(&self) -> (f64, f64) {
        (
            (self.domain.x1 - self.domain.x0) / (self.nx - 1) as f64,
            (self.domain.t1 - self.domain.t0) / (self.nt - 1) as f64,
        )
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        let (hx, ht) = self.spacing();
        (self.domain.x0 + i as f64 * hx, self.domain.t0 + j as f64 * ht)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nt + j]
    }

    /// Largest difference quotient between neighbouring nodes.
    pub fn lipschitz_estimate(&self) -> f64 {
        let (hx, ht) = self.spacing();
        let mut l: f64 = 0.0;
        for i in 0..self.nx {
            for j in 0..self.nt {
                if i + 1 < self.nx {
                    l = l.max((self.at(i + 1, j) - self.at(i, j)).abs() / hx);
                }
                if j + 1 < self.nt {
                    l = l.max((self.at(i, j + 1) - self.at(i, j)).abs() / ht);
                }
            }
        }
        l
    }

    fn locate(&self, x: f64, t: f64) -> (usize, usize, f64, f64) {
        let (hx, ht) = self.spacing();
        let fx = (x - self.domain.x0) / hx;
        let ft = (t - self.domain.t0) / ht;
        let i = (fx.floor().max(0.0) as usize).min(self.nx - 2);
        let j = (ft.floor().max(0.0) as usize).min(self.nt - 2);
        (i, j, fx - i as f64, ft - j as f64)
    }

    /// Whether `(x, t)` lies on an interior cell edge, where bilinear
    /// partials are evaluated one-sided.
    pub fn on_cell_edge(&self, x: f64, t: f64) -> bool {
        let (hx, ht) = self.spacing();
        let fx = (x - self.domain.x0) / hx;
        let ft = (t - self.domain.t0) / ht;
        let near = |f: f64, n: usize| {
            let r = f.round();
            (f - r).abs() < 1e-12 && r > 0.0 && (r as usize) < n - 1
        };
        near(fx, self.nx) || near(ft, self.nt)
    }

    fn jet(&self, x: f64, t: f64) -> Jet {
        let (hx, ht) = self.spacing();
        let (i, j, sx, st) = self.locate(x, t);
        match self.interpolation {
            Interpolation::Bilinear => {
                let (a, b, c, d) = (
                    self.at(i, j),
                    self.at(i + 1, j),
                    self.at(i, j + 1),
                    self.at(i + 1, j + 1),
                );
                let u = a * (1.0 - sx) * (1.0 - st) + b * sx * (1.0 - st) + c * (1.0 - sx) * st + d * sx * st;
                let ux = ((b - a) * (1.0 - st) + (d - c) * st) / hx;
                let ut = ((c - a) * (1.0 - sx) + (d - b) * sx) / ht;
                Jet { u, ux, ut }
            }
            Interpolation::Spline => {
                let basis = self.splines.as_ref().expect("spline basis is built with the interpolation");
                let (wx, dwx) = basis.0.weights(i, sx);
                let (wt, dwt) = basis.1.weights(j, st);
                let (mut u, mut ux, mut ut) = (0.0, 0.0, 0.0);
                for b in 0..self.nt {
                    let (mut r, mut dr) = (0.0, 0.0);
                    for a in 0..self.nx {
                        let v = self.at(a, b);
                        r += wx[a] * v;
                        dr += dwx[a] * v;
                    }
                    u += wt[b] * r;
                    ux += wt[b] * dr;
                    ut += dwt[b] * r;
                }
                Jet {
                    u,
                    ux: ux / hx,
                    ut: ut / ht,
                }
            }
            Interpolation::Bicubic => {
                let (wx, dwx) = catmull_rom(sx);
                let (wt, dwt) = catmull_rom(st);
                let mut u = 0.0;
                let mut ux = 0.0;
                let mut ut = 0.0;
                for a in 0..4 {
                    for b in 0..4 {
                        let v = self.ghosted(i as isize + a as isize - 1, j as isize + b as isize - 1);
                        u += wx[a] * wt[b] * v;
                        ux += dwx[a] * wt[b] * v;
                        ut += wx[a] * dwt[b] * v;
                    }
                }
                Jet {
                    u,
                    ux: ux / hx,
                    ut: ut / ht,
                }
            }
        }
    }

    // Linear extrapolation past the boundary ring.
    fn ghosted(&self, i: isize, j: isize) -> f64 {
        let (nx, nt) = (self.nx as isize, self.nt as isize);
        let clamp_axis = |k: isize, n: isize| -> (isize, isize, f64) {
            if k < 0 {
                (0, 1, -k as f64)
            } else if k >= n {
                (n - 1, n - 2, (k - n + 1) as f64)
            } else {
                (k, k, 0.0)
            }
        };
        let (i0, i1, ai) = clamp_axis(i, nx);
        let (j0, j1, aj) = clamp_axis(j, nt);
        let v = |a: isize, b: isize| self.at(a as usize, b as usize);
        let along_i = |b: isize| v(i0, b) + ai * (v(i0, b) - v(i1, b));
        along_i(j0) + aj * (along_i(j0) - along_i(j1))
    }
}

/// Cardinal cubic splines on `n` unit-spaced nodes: node second
/// derivatives are `M = moments · y`.
#[derive(Debug, Clone, PartialEq)]
struct SplineBasis {
    n: usize,
    moments: Vec<f64>,
}

impl SplineBasis {
    fn new(n: usize) -> Self {
        // rows: end conditions and M_{i-1} + 4 M_i + M_{i+1} = 6 (y_{i-1} − 2 y_i + y_{i+1})
        let mut a = vec![0.0; n * n];
        let mut b = vec![0.0; n * n];
        for i in 1..n - 1 {
            a[i * n + i - 1] = 1.0;
            a[i * n + i] = 4.0;
            a[i * n + i + 1] = 1.0;
            b[i * n + i - 1] = 6.0;
            b[i * n + i] = -12.0;
            b[i * n + i + 1] = 6.0;
        }
        if n >= 4 {
            // not-a-knot: third derivative continuous at nodes 1 and n − 2
            for (row, base) in [(0, 0), (n - 1, n - 3)] {
                a[row * n + base] = 1.0;
                a[row * n + base + 1] = -2.0;
                a[row * n + base + 2] = 1.0;
            }
        } else {
            a[0] = 1.0;
            a[n * n - 1] = 1.0;
        }
        SplineBasis {
            n,
            moments: solve_dense(a, b, n),
        }
    }

    /// Weights of every node value for the spline and its derivative
    /// (per unit spacing) at offset `s` in cell `i`.
    fn weights(&self, i: usize, s: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let r = 1.0 - s;
        let (ca, cb) = ((r * r * r - r) / 6.0, (s * s * s - s) / 6.0);
        let (da, db) = (-(3.0 * r * r - 1.0) / 6.0, (3.0 * s * s - 1.0) / 6.0);
        let mut w = vec![0.0; n];
        let mut dw = vec![0.0; n];
        for k in 0..n {
            let (mi, mj) = (self.moments[i * n + k], self.moments[(i + 1) * n + k]);
            w[k] = ca * mi + cb * mj;
            dw[k] = da * mi + db * mj;
        }
        w[i] += r;
        w[i + 1] += s;
        dw[i] -= 1.0;
        dw[i + 1] += 1.0;
        (w, dw)
    }
}

/// `A⁻¹ B` for dense row-major `n × n` matrices, partial pivoting.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Vec<f64> {
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a[x * n + c].abs().total_cmp(&a[y * n + c].abs()))
            .unwrap_or(c);
        if p != c {
            for k in 0..n {
                a.swap(c * n + k, p * n + k);
                b.swap(c * n + k, p * n + k);
            }
        }
        let piv = a[c * n + c];
        for r in 0..n {
            if r == c {
                continue;
            }
            let f = a[r * n + c] / piv;
            if f == 0.0 {
                continue;
            }
            for k in 0..n {
                a[r * n + k] -= f * a[c * n + k];
                b[r * n + k] -= f * b[c * n + k];
            }
        }
    }
    for r in 0..n {
        let piv = a[r * n + r];
        for k in 0..n {
            b[r * n + k] /= piv;
        }
    }
    b
}

fn catmull_rom(s: f64) -> ([f64; 4], [f64; 4]) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        [
            0.5 * (-s + 2.0 * s2 - s3),
            0.5 * (2.0 - 5.0 * s2 + 3.0 * s3),
            0.5 * (s + 4.0 * s2 - 3.0 * s3),
            0.5 * (-s2 + s3),
        ],
        [
            0.5 * (-1.0 + 4.0 * s - 3.0 * s2),
            0.5 * (-10.0 * s + 9.0 * s2),
            0.5 * (1.0 + 8.0 * s - 9.0 * s2),
            0.5 * (-2.0 * s + 3.0 * s2),
        ],
    )
}

#[derive(Debug, Clone)]
pub enum Backing {
    Expr(ScalarField),
    Grid(GridData),
}

/// The graph function `u: D → ℝ`.
#[derive(Debug, Clone)]
pub struct GraphFunction {
    pub domain: GraphDomain,
    pub backing: Backing,
    lipschitz: Option<f64>,
}

impl GraphFunction {
    pub fn from_expr(source: &str, domain: GraphDomain) -> Result<Self> {
        Ok(Self::from_field(ScalarField::parse(source, &[Var::X, Var::T])?, domain))
    }

    pub fn from_field(field: ScalarField, domain: GraphDomain) -> Self {
        GraphFunction {
            domain,
            backing: Backing::Expr(field),
            lipschitz: None,
        }
    }

    pub fn from_grid(grid: GridData) -> Self {
        GraphFunction {
            domain: grid.domain,
            lipschitz: Some(grid.lipschitz_estimate()),
            backing: Backing::Grid(grid),
        }
    }

    pub fn constant(c: f64, domain: GraphDomain) -> Self {
        Self::from_field(ScalarField::constant(c, &[Var::X, Var::T]), domain)
    }

    pub fn with_lipschitz(mut self, bound: f64) -> Self {
        self.lipschitz = Some(bound);
        self
    }

    /// Supplied bound, the grid estimate, or a sampled estimate for expressions.
    pub fn lipschitz_bound(&self) -> Result<f64> {
        if let Some(l) = self.lipschitz {
            return Ok(l);
        }
        let n = 64;
        let d = &self.domain;
        let mut l: f64 = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                let x = d.x0 + (d.x1 - d.x0) * i as f64 / n as f64;
                let t = d.t0 + (d.t1 - d.t0) * j as f64 / n as f64;
                let jet = self.jet(x, t)?;
                l = l.max(jet.ux.abs()).max(jet.ut.abs());
            }
        }
        Ok(l)
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self.backing, Backing::Expr(_))
    }

    pub fn as_grid(&self) -> Option<&GridData> {
        match &self.backing {
            Backing::Grid(g) => Some(g),
            Backing::Expr(_) => None,
        }
    }

    pub fn jet(&self, x: f64, t: f64) -> Result<Jet> {
        if !self.domain.contains(x, t) {
            return Err(Error::OutsideDomain { x, t });
        }
        match &self.backing {
            Backing::Expr(f) => {
                let d = f.dual_at(x, 0.0, t, 0.0)?;
                Ok(Jet {
                    u: d.v,
                    ux: d.partial(Var::X),
                    ut: d.partial(Var::T),
                })
            }
            Backing::Grid(g) => Ok(g.jet(x, t)),
        }
    }

    pub fn value(&self, x: f64, t: f64) -> Result<f64> {
        self.jet(x, t).map(|j| j.u)
    }
}

pub fn embed_jet(x: f64, t: f64, u: f64) -> ChartPoint {
    ChartPoint::new(x, u, t - x * u)
}

pub fn embed(u: &GraphFunction, q: (f64, f64)) -> Result<ChartPoint> {
    Ok(embed_jet(q.0, q.1, u.value(q.0, q.1)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangents {
    /// Coordinate components of `∂Φ/∂x` and `∂Φ/∂t`.
    pub e1_coord: [f64; 3],
    pub e2_coord: [f64; 3],
    /// The same vectors as `[a, b, c]` in the frame {X, Y, T}.
    pub e1_frame: [f64; 3],
    pub e2_frame: [f64; 3],
    /// Set for grid-backed `u` on a cell edge (one-sided partials).
    pub on_cell_edge: bool,
}

pub fn tangents(u: &GraphFunction, q: (f64, f64)) -> Result<Tangents> {
    let (x, t) = q;
    let j = u.jet(x, t)?;
    let on_cell_edge = u.as_grid().map(|g| g.on_cell_edge(x, t)).unwrap_or(false);
    Ok(Tangents {
        e1_coord: [1.0, j.ux, -j.u - x * j.ux],
        e2_coord: [0.0, j.ut, 1.0 - x * j.ut],
        e1_frame: [1.0, j.ux, -j.u],
        e2_frame: [0.0, j.ut, 1.0],
        on_cell_edge,
    })
}

pub fn char_slope(u: &GraphFunction, q: (f64, f64)) -> Result<f64> {
    let j = u.jet(q.0, q.1)?;
    Ok(j.ux + j.u * j.ut)
}

/// Everything the variational code needs at one parameter point.
#[derive(Debug, Clone, Copy)]
pub struct GraphPoint {
    pub q: (f64, f64),
    pub jet: Jet,
    pub point: ChartPoint,
    pub metric: FrameMetric,
    /// `W = u_x + u u_t`
    pub slope: f64,
    /// `|Z̃| = (g22 W² + 2 g12 W + g11)^{1/2}`
    pub area_element: f64,
}

impl GraphPoint {
    pub fn at(u: &GraphFunction, g: &MetricField, q: (f64, f64)) -> Result<Self> {
        let jet = u.jet(q.0, q.1)?;
        Self::from_jet(g, q, jet)
    }

    pub fn from_jet(g: &MetricField, q: (f64, f64), jet: Jet) -> Result<Self> {
        let point = embed_jet(q.0, q.1, jet.u);
        let metric = g.at(&point)?;
        let slope = jet.ux + jet.u * jet.ut;
        let rad = metric.g22.v * slope * slope + 2.0 * metric.g12.v * slope + metric.g11.v;
        if !(rad > 0.0) {
            return Err(Error::NotPositiveDefinite {
                x: point.x,
                y: point.y,
                t: point.t,
                g11: metric.g11.v,
                det: metric.det(),
            });
        }
        Ok(GraphPoint {
            q,
            jet,
            point,
            metric,
            slope,
            area_element: rad.sqrt(),
        })
    }

    /// Unit characteristic direction as frame coefficients.
    pub fn z(&self) -> (f64, f64) {
        (1.0 / self.area_element, self.slope / self.area_element)
    }

    /// Horizontal normal `ν_h = −j(Z)`.
    pub fn nu_h(&self) -> (f64, f64) {
        let j = self.metric.j_unit(self.z());
        (-j.0, -j.1)
    }

    /// `(|N_h|, Riemannian area element)` from the tangents and the extended metric.
    pub fn normal_split(&self) -> Result<(f64, f64)> {
        let e1 = [1.0, self.jet.ux, -self.jet.u];
        let e2 = [0.0, self.jet.ut, 1.0];
        let m = &self.metric;
        let gram = [
            [m.inner3(e1, e1), m.inner3(e1, e2)],
            [m.inner3(e1, e2), m.inner3(e2, e2)],
        ];
        let gram_det = gram[0][0] * gram[1][1] - gram[0][1] * gram[0][1];
        if !(gram_det > 0.0) {
            return Err(Error::Degenerate("tangent plane is degenerate".into()));
        }
        // G_ext N ∝ E1 × E2 (frame coefficients)
        let c = [
            e1[1] * e2[2] - e1[2] * e2[1],
            e1[2] * e2[0] - e1[0] * e2[2],
            e1[0] * e2[1] - e1[1] * e2[0],
        ];
        let nh = m.raise((c[0], c[1]));
        let n = [nh.0, nh.1, c[2]];
        let norm = m.inner3(n, n).sqrt();
        let n_h = m.norm(nh) / norm;
        Ok((n_h, gram_det.sqrt()))
    }
}

pub fn unit_z(u: &GraphFunction, q: (f64, f64), g: &MetricField) -> Result<HorizontalVec> {
    let gp = GraphPoint::at(u, g, q)?;
    let (a, b) = gp.z();
    Ok(HorizontalVec::new(gp.point, a, b))
}

pub fn area_element(u: &GraphFunction, q: (f64, f64), g: &MetricField) -> Result<f64> {
    Ok(GraphPoint::at(u, g, q)?.area_element)
}

pub fn nu_h(u: &GraphFunction, q: (f64, f64), g: &MetricField) -> Result<HorizontalVec> {
    let gp = GraphPoint::at(u, g, q)?;
    let (a, b) = gp.nu_h();
    Ok(HorizontalVec::new(gp.point, a, b))
}

/// `|N_h|` for the unit normal oriented so that `⟨N, ν_h⟩ ≥ 0`.
pub fn n_h_norm(u: &GraphFunction, q: (f64, f64), g: &MetricField) -> Result<f64> {
    Ok(GraphPoint::at(u, g, q)?.normal_split()?.0)
}

/// Riemannian area element `|E1 ∧ E2|_g` of the embedded graph.
pub fn riemannian_area_element(u: &GraphFunction, q: (f64, f64), g: &MetricField) -> Result<f64> {
    Ok(GraphPoint::at(u, g, q)?.normal_split()?.1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZxReport {
    /// `|1 − det(G)⁻¹(g22⟨Z,X⟩² − 2 g12⟨Z,X⟩⟨Z,Y⟩ + g11⟨Z,Y⟩²)|`
    pub unit_residual: f64,
    /// `|⟨Z,X⟩ − (g12⟨Z,Y⟩ + √(det(G)(g22 − ⟨Z,Y⟩²)))/g22|`
    pub branch_residual: f64,
    /// `g22 − ⟨Z,Y⟩²`, strictly positive.
    pub schwarz_margin: f64,
}

impl ZxReport {
    pub fn residual(&self) -> f64 {
        self.unit_residual.max(self.branch_residual)
    }
}

/// Checks the `⟨Z,X⟩`/`⟨Z,Y⟩` identities. The `+` branch is the one
/// consistent with a positive X-coefficient of `Z`.
pub fn zx_check(u: &GraphFunction, q: (f64, f64), g: &MetricField) -> Result<ZxReport> {
    let gp = GraphPoint::at(u, g, q)?;
    let m = &gp.metric;
    let (zx, zy) = m.lower(gp.z());
    let (g11, g12, g22) = (m.g11.v, m.g12.v, m.g22.v);
    let det = m.det();
    let unit = (g22 * zx * zx - 2.0 * g12 * zx * zy + g11 * zy * zy) / det;
    let margin = g22 - zy * zy;
    if !(margin > 0.0) {
        return Err(Error::Degenerate(
            "Z is collinear with Y (Schwarz equality)".into(),
        ));
    }
    let branch = (g12 * zy + (det * margin).sqrt()) / g22;
    Ok(ZxReport {
        unit_residual: (1.0 - unit).abs(),
        branch_residual: (zx - branch).abs(),
        schwarz_margin: margin,
    })
}

/// Default step for differencing `Z` along the characteristic direction.
pub const DEFAULT_CURVATURE_STEP: f64 = 1e-5;

/// `H = ⟨∇_Z Z, ν_h⟩` at a parameter point. `Z` is differenced along the
/// characteristic direction `(1, u)` of the parameter plane, where the
/// lifted curve has tangent `Z̃ = |Z̃| Z`.
pub fn mean_curvature_at(u: &GraphFunction, g: &MetricField, q: (f64, f64), delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {delta}")));
    }
    let gp = GraphPoint::at(u, g, q)?;
    let dir = (1.0, gp.jet.u);
    let shifted = |k: f64| (q.0 + k * delta * dir.0, q.1 + k * delta * dir.1);
    let z_at = |k: f64| -> Result<(f64, f64)> { Ok(GraphPoint::at(u, g, shifted(k))?.z()) };
    let inside = |k: f64| {
        let p = shifted(k);
        u.domain.contains(p.0, p.1)
    };
    let z0 = gp.z();
    let dz = if inside(1.0) && inside(-1.0) {
        let (a, b) = (z_at(1.0)?, z_at(-1.0)?);
        ((a.0 - b.0) / (2.0 * delta), (a.1 - b.1) / (2.0 * delta))
    } else {
        let sgn = if inside(1.0) { 1.0 } else { -1.0 };
        let (a, b) = (z_at(sgn)?, z_at(2.0 * sgn)?);
        (
            sgn * (-3.0 * z0.0 + 4.0 * a.0 - b.0) / (2.0 * delta),
            sgn * (-3.0 * z0.1 + 4.0 * a.1 - b.1) / (2.0 * delta),
        )
    };
    let conn = crate::contact_chart::nabla_frame_from(&gp.metric)?;
    let c = conn.contract(z0, z0);
    let nabla = (dz.0 / gp.area_element + c.0, dz.1 / gp.area_element + c.1);
    Ok(gp.metric.inner(nabla, gp.nu_h()))
}
