//! The intrinsic-graph area functional, its first variation with the
//! `K`/`M` coefficients, and finite-difference and geometric cross-checks.
//!
//! For `W = u_x + u u_t` and `R = (g22 W² + 2 g12 W + g11)^{1/2}`:
//!
//! ```text
//! K1 = (Y(g22) W² + 2 Y(g12) W + Y(g11)) / (2R)
//! M  = (g22 W + g12) / R
//! K  = K1 − f det(G)
//! δ(A − V)[v] = ∫_D K v + M (v_x + u v_t + v u_t) dx dt
//! ```
//!
//! Metric entries and `f` are evaluated at the embedded point `Φ(x, t)`.
//! Since `∂Φ/∂u = (0, 1, −x) = Y`, the metric derivative in `K1` is taken
//! along `Y = ∂_y − x ∂_t`; it is `∂_y` whenever `G` does not depend on `t`.

use crate::contact_chart::{ChartPoint, MetricField};
use crate::error::{Error, Result};
use crate::fields::{ScalarField, Var};
use crate::intrinsic_graph::{
    mean_curvature_at, GraphDomain, GraphFunction, GraphPoint, Jet, DEFAULT_CURVATURE_STEP,
};
use crate::quadrature::Quadrature;

/// Prescribed curvature `f(x, y, t)` on the chart.
pub fn curvature_field(source: &str) -> Result<ScalarField> {
    Ok(ScalarField::parse(source, &[Var::X, Var::Y, Var::T])?)
}

pub fn zero_curvature() -> ScalarField {
    ScalarField::constant(0.0, &[Var::X, Var::Y, Var::T])
}

/// `f` sampled at chart points.
pub fn prescribed_along(f: &ScalarField, points: &[ChartPoint]) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|p| Ok(f.value_at(p.x, p.y, p.t, 0.0)?))
        .collect()
}

/// Anything with a value and first partials on the parameter plane.
pub trait TestFunction: Sync {
    fn test_jet(&self, x: f64, t: f64) -> Result<Jet>;
}

impl TestFunction for GraphFunction {
    fn test_jet(&self, x: f64, t: f64) -> Result<Jet> {
        self.jet(x, t)
    }
}

/// `amplitude · p((x − cx)/rx) · p((t − ct)/rt)` with `p(s) = (1 − s²)⁶` on
/// `|s| < 1` and zero outside; C⁵ with support in the given box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub cx: f64,
    pub ct: f64,
    pub rx: f64,
    pub rt: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn new(cx: f64, ct: f64, rx: f64, rt: f64) -> Self {
        Bump {
            cx,
            ct,
            rx,
            rt,
            amplitude: 1.0,
        }
    }

    pub fn scaled(mut self, amplitude: f64) -> Self {
        self.amplitude *= amplitude;
        self
    }

    /// Whether the support sits inside `d` with at least `margin` to spare.
    pub fn fits(&self, d: &GraphDomain, margin: f64) -> bool {
        self.cx - self.rx >= d.x0 + margin
            && self.cx + self.rx <= d.x1 - margin
            && self.ct - self.rt >= d.t0 + margin
            && self.ct + self.rt <= d.t1 - margin
    }

    /// Bumps on an `n × n` lattice of centres with support radius `fill`
    /// times the lattice half-spacing.
    pub fn lattice(d: &GraphDomain, n: usize, fill: f64) -> Vec<Bump> {
        let hx = (d.x1 - d.x0) / (n + 1) as f64;
        let ht = (d.t1 - d.t0) / (n + 1) as f64;
        let mut out = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in 1..=n {
                out.push(Bump::new(
                    d.x0 + i as f64 * hx,
                    d.t0 + j as f64 * ht,
                    fill * hx,
                    fill * ht,
                ));
            }
        }
        out
    }
}

fn profile(s: f64) -> (f64, f64) {
    if s.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let a = 1.0 - s * s;
    let a5 = a * a * a * a * a;
    (a5 * a, -12.0 * s * a5)
}

impl TestFunction for Bump {
    fn test_jet(&self, x: f64, t: f64) -> Result<Jet> {
        let (px, dpx) = profile((x - self.cx) / self.rx);
        let (pt, dpt) = profile((t - self.ct) / self.rt);
        Ok(Jet {
            u: self.amplitude * px * pt,
            ux: self.amplitude * dpx * pt / self.rx,
            ut: self.amplitude * px * dpt / self.rt,
        })
    }
}

/// `A(G_u) = ∫_D R dx dt`.
pub fn area(u: &GraphFunction, g: &MetricField, quad: &Quadrature) -> Result<f64> {
    quad.integrate(&u.domain, |x, t| Ok(GraphPoint::at(u, g, (x, t))?.area_element))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub k1: f64,
    pub m: f64,
    pub k: f64,
}

pub fn coefficients_at(gp: &GraphPoint, f: &ScalarField) -> Result<Coefficients> {
    let w = gp.slope;
    let m = &gp.metric;
    let r = gp.area_element;
    let dy = |i, j| m.frame_derivative(i, j, 1);
    let k1 = (dy(1, 1) * w * w + 2.0 * dy(0, 1) * w + dy(0, 0)) / (2.0 * r);
    let mm = (m.g22.v * w + m.g12.v) / r;
    let p = gp.point;
    let fv = f.value_at(p.x, p.y, p.t, 0.0)?;
    Ok(Coefficients {
        k1,
        m: mm,
        k: k1 - fv * m.det(),
    })
}

pub fn coefficients(
    u: &GraphFunction,
    q: (f64, f64),
    g: &MetricField,
    f: &ScalarField,
) -> Result<Coefficients> {
    coefficients_at(&GraphPoint::at(u, g, q)?, f)
}

/// Largest `|v|` on `∂D`, sampled at `n` points per edge.
pub fn boundary_magnitude<V: TestFunction>(v: &V, d: &GraphDomain, n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..=n {
        let s = k as f64 / n as f64;
        let x = d.x0 + s * (d.x1 - d.x0);
        let t = d.t0 + s * (d.t1 - d.t0);
        for (a, b) in [(x, d.t0), (x, d.t1), (d.x0, t), (d.x1, t)] {
            worst = worst.max(v.test_jet(a, b)?.u.abs());
        }
    }
    Ok(worst)
}

const SUPPORT_TOL: f64 = 1e-10;

fn require_compact<V: TestFunction>(v: &V, d: &GraphDomain) -> Result<()> {
    let b = boundary_magnitude(v, d, 256)?;
    if b > SUPPORT_TOL {
        return Err(Error::InvalidArgument(format!(
            "test function is {b:e} on the boundary; it must vanish there"
        )));
    }
    Ok(())
}

/// `∫_D K v + M (v_x + u v_t + v u_t) dx dt`; `v` must vanish on `∂D`.
pub fn first_variation<V: TestFunction>(
    u: &GraphFunction,
    v: &V,
    f: &ScalarField,
    g: &MetricField,
    quad: &Quadrature,
) -> Result<f64> {
    require_compact(v, &u.domain)?;
    first_variation_unchecked(u, v, f, g, quad)
}

pub(crate) fn first_variation_unchecked<V: TestFunction>(
    u: &GraphFunction,
    v: &V,
    f: &ScalarField,
    g: &MetricField,
    quad: &Quadrature,
) -> Result<f64> {
    quad.integrate(&u.domain, |x, t| {
        let tv = v.test_jet(x, t)?;
        if tv.u == 0.0 && tv.ux == 0.0 && tv.ut == 0.0 {
            return Ok(0.0);
        }
        let gp = GraphPoint::at(u, g, (x, t))?;
        let c = coefficients_at(&gp, f)?;
        let j = gp.jet;
        Ok(c.k * tv.u + c.m * (tv.ux + j.u * tv.ut + tv.u * j.ut))
    })
}

/// `∫_D f det(G) v dx dt` with `f` and `G` at the embedded graph of `u`.
pub fn volume_derivative<V: TestFunction>(
    u: &GraphFunction,
    f: &ScalarField,
    g: &MetricField,
    v: &V,
    quad: &Quadrature,
) -> Result<f64> {
    quad.integrate(&u.domain, |x, t| {
        let tv = v.test_jet(x, t)?;
        if tv.u == 0.0 {
            return Ok(0.0);
        }
        let j = u.jet(x, t)?;
        let p = crate::intrinsic_graph::embed_jet(x, t, j.u);
        let m = g.at(&p)?;
        Ok(f.value_at(p.x, p.y, p.t, 0.0)? * m.det() * tv.u)
    })
}

fn area_of_sum<V: TestFunction>(
    u: &GraphFunction,
    v: &V,
    s: f64,
    g: &MetricField,
    quad: &Quadrature,
) -> Result<f64> {
    quad.integrate(&u.domain, |x, t| {
        let a = u.jet(x, t)?;
        let b = v.test_jet(x, t)?;
        let jet = Jet {
            u: a.u + s * b.u,
            ux: a.ux + s * b.ux,
            ut: a.ut + s * b.ut,
        };
        Ok(GraphPoint::from_jet(g, (x, t), jet)?.area_element)
    })
}

/// Independent route: `(A(u + hv) − A(u − hv)) / 2h − ∫ f det(G) v`.
pub fn fd_variation_oracle<V: TestFunction>(
    u: &GraphFunction,
    v: &V,
    f: &ScalarField,
    g: &MetricField,
    quad: &Quadrature,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let plus = area_of_sum(u, v, h, g, quad)?;
    let minus = area_of_sum(u, v, -h, g, quad)?;
    Ok((plus - minus) / (2.0 * h) - volume_derivative(u, f, g, v, quad)?)
}

/// `−∫_Σ (H − f) |N_h| g(U, ν_h) dΣ` for `U = φ Y`, the graph variation
/// `u ↦ u + sφ` seen as a horizontal flow. Agrees with
/// [`first_variation`] for smooth `u`.
pub fn geometric_first_variation<V: TestFunction>(
    u: &GraphFunction,
    phi: &V,
    f: &ScalarField,
    g: &MetricField,
    quad: &Quadrature,
) -> Result<f64> {
    if !u.is_smooth() {
        return Err(Error::InvalidArgument(
            "mean curvature needs an expression-backed graph".into(),
        ));
    }
    require_compact(phi, &u.domain)?;
    quad.integrate(&u.domain, |x, t| {
        let tv = phi.test_jet(x, t)?;
        if tv.u == 0.0 {
            return Ok(0.0);
        }
        let gp = GraphPoint::at(u, g, (x, t))?;
        let h = mean_curvature_at(u, g, (x, t), DEFAULT_CURVATURE_STEP)?;
        let p = gp.point;
        let fv = f.value_at(p.x, p.y, p.t, 0.0)?;
        let (n_h, d_sigma) = gp.normal_split()?;
        let u_dot_nu = tv.u * gp.metric.inner((0.0, 1.0), gp.nu_h());
        Ok(-(h - fv) * n_h * u_dot_nu * d_sigma)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationReport {
    pub formula: f64,
    pub oracle: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
}

impl VariationReport {
    pub fn new(formula: f64, oracle: f64) -> Self {
        let abs_gap = (formula - oracle).abs();
        let scale = formula.abs().max(oracle.abs());
        VariationReport {
            formula,
            oracle,
            abs_gap,
            rel_gap: if scale > 0.0 { abs_gap / scale } else { 0.0 },
        }
    }

    /// `|gap| ≤ max(abs_floor, rel · |value|)`
    pub fn within(&self, abs_floor: f64, rel: f64) -> bool {
        self.abs_gap <= abs_floor.max(rel * self.formula.abs().max(self.oracle.abs()))
    }
}

pub fn variation_report<V: TestFunction>(
    u: &GraphFunction,
    v: &V,
    f: &ScalarField,
    g: &MetricField,
    quad: &Quadrature,
    h: f64,
) -> Result<VariationReport> {
    Ok(VariationReport::new(
        first_variation(u, v, f, g, quad)?,
        fd_variation_oracle(u, v, f, g, quad, h)?,
    ))
}
