//! The fixed Darboux chart and the metric objects built on it.
//!
//! Coordinates are (x, y, t) with contact form `ω = dt + x dy`, horizontal
//! frame `X = ∂x`, `Y = ∂y − x ∂t` and Reeb field `T = ∂t`, so that
//! `[X, Y] = −T`. A metric `G` on the horizontal distribution is extended to
//! a Riemannian metric by declaring `T` unit and orthogonal to `{X, Y}`.
//!
//! Horizontal vectors are stored as frame coefficients `(a, b)` meaning
//! `aX + bY`. Full tangent vectors in frame coefficients are `[a, b, c]`
//! meaning `aX + bY + cT`.

use crate::error::{Error, Result};
use crate::fields::{Dual, ScalarField, Var};

/// Default finite-difference step for the coordinate Levi-Civita connection.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl ChartPoint {
    pub fn new(x: f64, y: f64, t: f64) -> Self {
        ChartPoint { x, y, t }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.t]
    }

    pub fn from_coords(c: [f64; 3]) -> Self {
        ChartPoint::new(c[0], c[1], c[2])
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }

    pub fn distance(&self, other: &ChartPoint) -> f64 {
        let (dx, dy, dt) = (self.x - other.x, self.y - other.y, self.t - other.t);
        (dx * dx + dy * dy + dt * dt).sqrt()
    }
}

/// Coordinate components of the frame at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub t: [f64; 3],
}

pub fn frame_at(p: &ChartPoint) -> Frame {
    Frame {
        x: [1.0, 0.0, 0.0],
        y: [0.0, 1.0, -p.x],
        t: [0.0, 0.0, 1.0],
    }
}

/// `ω(v) = v_t + x v_y` for a coordinate vector `v` at `p`.
pub fn contact_form(p: &ChartPoint, v: [f64; 3]) -> f64 {
    v[2] + p.x * v[1]
}

/// Coordinate vector at `p` to frame coefficients `[a, b, c]`.
pub fn coord_to_frame(p: &ChartPoint, v: [f64; 3]) -> [f64; 3] {
    [v[0], v[1], v[2] + p.x * v[1]]
}

/// Frame coefficients `[a, b, c]` at `p` to a coordinate vector.
pub fn frame_to_coord(p: &ChartPoint, f: [f64; 3]) -> [f64; 3] {
    [f[0], f[1], f[2] - p.x * f[1]]
}

/// Lie bracket of two vector fields given by coordinate components and
/// their coordinate Jacobians (`jac[i][j] = ∂_j v^i`).
pub fn lie_bracket(u: [f64; 3], du: [[f64; 3]; 3], v: [f64; 3], dv: [[f64; 3]; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..3 {
            *o += u[j] * dv[i][j] - v[j] * du[i][j];
        }
    }
    out
}

/// Coordinate Jacobians of the frame fields X, Y, T (constant in the chart).
pub fn frame_jacobians() -> [[[f64; 3]; 3]; 3] {
    let zero = [[0.0; 3]; 3];
    let mut dy = zero;
    // Y = (0, 1, -x): ∂_x Y^t = -1
    dy[2][0] = -1.0;
    [zero, dy, zero]
}

/// Horizontal metric coefficients as expressions over (x, y, t).
#[derive(Debug, Clone)]
pub struct MetricField {
    pub g11: ScalarField,
    pub g12: ScalarField,
    pub g22: ScalarField,
    name: Option<&'static str>,
}

const CHART_VARS: [Var; 3] = [Var::X, Var::Y, Var::T];

impl MetricField {
    /// The standard sub-Riemannian Heisenberg metric: `{X, Y}` orthonormal.
    pub fn heisenberg() -> Self {
        MetricField {
            g11: ScalarField::constant(1.0, &CHART_VARS),
            g12: ScalarField::constant(0.0, &CHART_VARS),
            g22: ScalarField::constant(1.0, &CHART_VARS),
            name: Some("heisenberg"),
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "heisenberg" => Some(Self::heisenberg()),
            _ => None,
        }
    }

    pub fn from_sources(g11: &str, g12: &str, g22: &str) -> Result<Self> {
        Ok(MetricField {
            g11: ScalarField::parse(g11, &CHART_VARS)?,
            g12: ScalarField::parse(g12, &CHART_VARS)?,
            g22: ScalarField::parse(g22, &CHART_VARS)?,
            name: None,
        })
    }

    pub fn name(&self) -> Option<&'static str> {
        self.name
    }

    pub fn is_heisenberg(&self) -> bool {
        self.name == Some("heisenberg")
    }

    pub fn is_constant(&self) -> bool {
        self.g11.as_constant().is_some()
            && self.g12.as_constant().is_some()
            && self.g22.as_constant().is_some()
    }

    /// Metric entries and their coordinate partials at `p`; fails unless SPD.
    pub fn at(&self, p: &ChartPoint) -> Result<FrameMetric> {
        let m = FrameMetric {
            base: *p,
            g11: self.g11.dual_at(p.x, p.y, p.t, 0.0)?,
            g12: self.g12.dual_at(p.x, p.y, p.t, 0.0)?,
            g22: self.g22.dual_at(p.x, p.y, p.t, 0.0)?,
        };
        let det = m.det();
        if !(m.g11.v > 0.0 && det > 0.0) {
            return Err(Error::NotPositiveDefinite {
                x: p.x,
                y: p.y,
                t: p.t,
                g11: m.g11.v,
                det,
            });
        }
        Ok(m)
    }
}

/// The metric sampled at one point, with first partials of each entry.
#[derive(Debug, Clone, Copy)]
pub struct FrameMetric {
    pub base: ChartPoint,
    pub g11: Dual,
    pub g12: Dual,
    pub g22: Dual,
}

impl FrameMetric {
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.g11.v, self.g12.v], [self.g12.v, self.g22.v]]
    }

    pub fn det(&self) -> f64 {
        self.g11.v * self.g22.v - self.g12.v * self.g12.v
    }

    pub fn inverse(&self) -> [[f64; 2]; 2] {
        let d = self.det();
        [
            [self.g22.v / d, -self.g12.v / d],
            [-self.g12.v / d, self.g11.v / d],
        ]
    }

    pub fn inner(&self, u: (f64, f64), v: (f64, f64)) -> f64 {
        self.g11.v * u.0 * v.0 + self.g12.v * (u.0 * v.1 + u.1 * v.0) + self.g22.v * u.1 * v.1
    }

    pub fn norm(&self, u: (f64, f64)) -> f64 {
        self.inner(u, u).max(0.0).sqrt()
    }

    /// Lowers a horizontal vector: `G u`.
    pub fn lower(&self, u: (f64, f64)) -> (f64, f64) {
        (
            self.g11.v * u.0 + self.g12.v * u.1,
            self.g12.v * u.0 + self.g22.v * u.1,
        )
    }

    /// Raises a covector: `G⁻¹ w`.
    pub fn raise(&self, w: (f64, f64)) -> (f64, f64) {
        let inv = self.inverse();
        (
            inv[0][0] * w.0 + inv[0][1] * w.1,
            inv[1][0] * w.0 + inv[1][1] * w.1,
        )
    }

    /// Entry `g_ij` (i, j ∈ {0, 1}) as a dual number.
    pub fn entry(&self, i: usize, j: usize) -> Dual {
        match (i, j) {
            (0, 0) => self.g11,
            (1, 1) => self.g22,
            _ => self.g12,
        }
    }

    /// Derivative of `g_ij` along frame field `k` (0 = X, 1 = Y).
    pub fn frame_derivative(&self, i: usize, j: usize, k: usize) -> f64 {
        let e = self.entry(i, j);
        match k {
            0 => e.partial(Var::X),
            _ => e.partial(Var::Y) - self.base.x * e.partial(Var::T),
        }
    }

    /// `∂g_ij/∂y` at the base point.
    pub fn dy(&self, i: usize, j: usize) -> f64 {
        self.entry(i, j).partial(Var::Y)
    }

    /// Extended metric on frame coefficients `[a, b, c]`.
    pub fn inner3(&self, u: [f64; 3], v: [f64; 3]) -> f64 {
        self.inner((u[0], u[1]), (v[0], v[1])) + u[2] * v[2]
    }

    /// Coordinate expression of the extended metric (∂y = Y + xT).
    pub fn coordinate_matrix(&self) -> [[f64; 3]; 3] {
        let x = self.base.x;
        [
            [self.g11.v, self.g12.v, 0.0],
            [self.g12.v, self.g22.v + x * x, x],
            [0.0, x, 1.0],
        ]
    }

    /// Orthonormal horizontal frame by Gram–Schmidt with `e1 ∝ X`.
    pub fn orthonormal_frame(&self) -> ((f64, f64), (f64, f64)) {
        let g11 = self.g11.v;
        let det = self.det();
        let e1 = (1.0 / g11.sqrt(), 0.0);
        let e2 = (-self.g12.v / (g11 * det).sqrt(), (g11 / det).sqrt());
        (e1, e2)
    }

    /// `J(v)` from `2⟨J(v), w⟩ = −⟨[v, w], T⟩` with `[X, Y] = −T`.
    pub fn j(&self, v: (f64, f64)) -> (f64, f64) {
        self.raise((-0.5 * v.1, 0.5 * v.0))
    }

    /// Unit rotation `J/|J|`; equals `2 √det(G) J`.
    pub fn j_unit(&self, v: (f64, f64)) -> (f64, f64) {
        let s = 2.0 * self.det().sqrt();
        let w = self.j(v);
        (s * w.0, s * w.1)
    }
}

/// A horizontal tangent vector `aX + bY` at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizontalVec {
    pub base: ChartPoint,
    pub a: f64,
    pub b: f64,
}

impl HorizontalVec {
    pub fn new(base: ChartPoint, a: f64, b: f64) -> Self {
        HorizontalVec { base, a, b }
    }

    pub fn coeffs(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Coordinate components `aX + bY`.
    pub fn to_coords(&self) -> [f64; 3] {
        [self.a, self.b, -self.base.x * self.b]
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0.0 && self.b == 0.0
    }
}

pub fn inner(u: &HorizontalVec, v: &HorizontalVec, g: &MetricField) -> Result<f64> {
    if u.base != v.base {
        return Err(Error::BaseMismatch);
    }
    Ok(g.at(&u.base)?.inner(u.coeffs(), v.coeffs()))
}

pub fn j_apply(g: &MetricField, v: &HorizontalVec) -> Result<HorizontalVec> {
    let (a, b) = g.at(&v.base)?.j(v.coeffs());
    Ok(HorizontalVec::new(v.base, a, b))
}

/// Normalized rotation `j = J/|J|`.
pub fn j_unit_apply(g: &MetricField, v: &HorizontalVec) -> Result<HorizontalVec> {
    let (a, b) = g.at(&v.base)?.j_unit(v.coeffs());
    Ok(HorizontalVec::new(v.base, a, b))
}

/// Christoffel symbols `gamma[k][i][j]` of a coordinate metric, using central
/// differences of `metric` with step `h`.
pub fn christoffel_from<F>(metric: F, p: &ChartPoint, h: f64) -> Result<[[[f64; 3]; 3]; 3]>
where
    F: Fn(&ChartPoint) -> Result<[[f64; 3]; 3]>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let g0 = metric(p)?;
    // dg[l][i][j] = ∂_l g_ij
    let mut dg = [[[0.0; 3]; 3]; 3];
    for (l, slot) in dg.iter_mut().enumerate() {
        let mut plus = p.coords();
        let mut minus = p.coords();
        plus[l] += h;
        minus[l] -= h;
        let gp = metric(&ChartPoint::from_coords(plus))?;
        let gm = metric(&ChartPoint::from_coords(minus))?;
        for i in 0..3 {
            for j in 0..3 {
                slot[i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
            }
        }
    }
    let ginv = invert3(&g0).ok_or_else(|| Error::Degenerate("singular coordinate metric".into()))?;
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut lower = [0.0; 3];
            for (l, low) in lower.iter_mut().enumerate() {
                *low = 0.5 * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
            }
            for k in 0..3 {
                gamma[k][i][j] = (0..3).map(|l| ginv[k][l] * lower[l]).sum();
            }
        }
    }
    Ok(gamma)
}

/// Levi-Civita Christoffels of the extended metric in (x, y, t) coordinates.
pub fn levi_civita_coord(g: &MetricField, p: &ChartPoint, h: f64) -> Result<[[[f64; 3]; 3]; 3]> {
    christoffel_from(|q| Ok(g.at(q)?.coordinate_matrix()), p, h)
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let det = m[0][0] * c(1, 2, 1, 2) - m[0][1] * c(1, 2, 0, 2) + m[0][2] * c(1, 2, 0, 1);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let adj = [
        [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
        [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
        [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
    ];
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            inv[i][j] = adj[i][j] / det;
        }
    }
    Some(inv)
}

/// `D_{E_i} T` in frame coefficients for `E_i ∈ {X, Y, T}`, from the
/// coordinate Christoffels.
pub fn reeb_derivatives(g: &MetricField, p: &ChartPoint, h: f64) -> Result<[[f64; 3]; 3]> {
    let gamma = levi_civita_coord(g, p, h)?;
    let col = |i: usize, j: usize| [gamma[0][i][j], gamma[1][i][j], gamma[2][i][j]];
    // T = ∂t has constant components, so D_V T = V^i Γ^k_{i t} ∂_k.
    let dx = col(0, 2);
    let dt = col(2, 2);
    let dyt = col(1, 2);
    let dy = [
        dyt[0] - p.x * dt[0],
        dyt[1] - p.x * dt[1],
        dyt[2] - p.x * dt[2],
    ];
    Ok([
        coord_to_frame(p, dx),
        coord_to_frame(p, dy),
        coord_to_frame(p, dt),
    ])
}

/// Symmetric form `½(⟨D_a T, b⟩ + ⟨D_b T, a⟩)` on the full frame {X, Y, T}.
pub fn tau_form(g: &MetricField, p: &ChartPoint, h: f64) -> Result<[[f64; 3]; 3]> {
    let m = g.at(p)?;
    let d = reeb_derivatives(g, p, h)?;
    let basis = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut s = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            s[i][j] = 0.5 * (m.inner3(d[i], basis[j]) + m.inner3(d[j], basis[i]));
        }
    }
    Ok(s)
}

/// Sub-Riemannian torsion `τ(v)` for horizontal `v`.
pub fn tau_apply(g: &MetricField, v: &HorizontalVec, h: f64) -> Result<HorizontalVec> {
    let m = g.at(&v.base)?;
    let s = tau_form(g, &v.base, h)?;
    let w = (
        s[0][0] * v.a + s[1][0] * v.b,
        s[0][1] * v.a + s[1][1] * v.b,
    );
    let (a, b) = m.raise(w);
    Ok(HorizontalVec::new(v.base, a, b))
}

/// Horizontal part of `τ(T)`; vanishes for every metric of this chart.
pub fn tau_of_reeb(g: &MetricField, p: &ChartPoint, h: f64) -> Result<(f64, f64)> {
    let m = g.at(p)?;
    let s = tau_form(g, p, h)?;
    Ok(m.raise((s[2][0], s[2][1])))
}

/// `∇_v T = D_v T − J(v) − τ(v)`, which the torsion convention forces to zero.
pub fn nabla_reeb(g: &MetricField, v: &HorizontalVec, h: f64) -> Result<[f64; 3]> {
    let m = g.at(&v.base)?;
    let d = reeb_derivatives(g, &v.base, h)?;
    let dv: Vec<f64> = (0..3).map(|k| v.a * d[0][k] + v.b * d[1][k]).collect();
    let j = m.j(v.coeffs());
    let tau = tau_apply(g, v, h)?;
    Ok([dv[0] - j.0 - tau.a, dv[1] - j.1 - tau.b, dv[2]])
}

/// Horizontal coefficients of the sub-Riemannian connection at a point:
/// `∇_{E_i} E_j = Σ_k gamma[i][j][k] E_k` with `E_0 = X`, `E_1 = Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConnection {
    pub base: ChartPoint,
    pub gamma: [[[f64; 2]; 2]; 2],
}

impl FrameConnection {
    /// `Σ u^i v^j Γ^k_ij` — the zeroth-order part of `∇_u V`.
    pub fn contract(&self, u: (f64, f64), v: (f64, f64)) -> (f64, f64) {
        let u = [u.0, u.1];
        let v = [v.0, v.1];
        let mut out = [0.0; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out[k] += u[i] * v[j] * self.gamma[i][j][k];
                }
            }
        }
        (out[0], out[1])
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma
            .iter()
            .flatten()
            .flatten()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// Koszul formula restricted to horizontal frame fields. Brackets and
/// torsion are vertical there, so only frame derivatives of `g_ij` remain.
pub fn nabla_frame(g: &MetricField, p: &ChartPoint) -> Result<FrameConnection> {
    let m = g.at(p)?;
    nabla_frame_from(&m)
}

pub fn nabla_frame_from(m: &FrameMetric) -> Result<FrameConnection> {
    let mut gamma = [[[0.0; 2]; 2]; 2];
    if m.det() <= 0.0 {
        return Err(Error::Degenerate("singular metric".into()));
    }
    for i in 0..2 {
        for j in 0..2 {
            let mut lower = [0.0; 2];
            for (k, low) in lower.iter_mut().enumerate() {
                *low = 0.5
                    * (m.frame_derivative(j, k, i) + m.frame_derivative(i, k, j)
                        - m.frame_derivative(i, j, k));
            }
            let (a, b) = m.raise((lower[0], lower[1]));
            gamma[i][j] = [a, b];
        }
    }
    Ok(FrameConnection { base: m.base, gamma })
}

/// `(ω ∧ dω)(v, J(v), T)`; positive for the standard orientation.
pub fn orientation_check(g: &MetricField, p: &ChartPoint, v: &HorizontalVec) -> Result<f64> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let m = g.at(p)?;
    let jv = m.j(v.coeffs());
    let fr = frame_at(p);
    let coords = |a: f64, b: f64, c: f64| -> [f64; 3] {
        [
            a * fr.x[0] + b * fr.y[0] + c * fr.t[0],
            a * fr.x[1] + b * fr.y[1] + c * fr.t[1],
            a * fr.x[2] + b * fr.y[2] + c * fr.t[2],
        ]
    };
    let u1 = coords(v.a, v.b, 0.0);
    let u2 = coords(jv.0, jv.1, 0.0);
    let u3 = coords(0.0, 0.0, 1.0);
    // ω ∧ dω = dt ∧ dx ∧ dy in these coordinates.
    let row = |u: [f64; 3]| [u[2], u[0], u[1]];
    let (a, b, c) = (row(u1), row(u2), row(u3));
    Ok(a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0]))
}

/// Analytic Christoffels of the Heisenberg coordinate metric, kept as a
/// reference for the finite-difference route.
pub fn heisenberg_christoffel(p: &ChartPoint) -> [[[f64; 3]; 3]; 3] {
    let x = p.x;
    // Only ∂x g_yy = 2x and ∂x g_yt = 1 are nonzero.
    let mut dg = [[[0.0; 3]; 3]; 3];
    dg[0][1][1] = 2.0 * x;
    dg[0][1][2] = 1.0;
    dg[0][2][1] = 1.0;
    let ginv = [[1.0, 0.0, 0.0], [0.0, 1.0, -x], [0.0, -x, 1.0 + x * x]];
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                gamma[k][i][j] = (0..3)
                    .map(|l| ginv[k][l] * 0.5 * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]))
                    .sum();
            }
        }
    }
    gamma
}
