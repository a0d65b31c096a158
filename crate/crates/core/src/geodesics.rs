//! ∇-geodesics of prescribed curvature, `∇_γ̇ γ̇ + h j(γ̇) = 0`, with `j` the
//! unit rotation of the horizontal plane.
//!
//! The integrator carries the angle `θ` of the unit tangent in the
//! orthonormal frame `{e1, e2}` (`e1 ∝ X`). With `ω(V) = ⟨∇_V e1, e2⟩` the
//! equation reduces to `θ' = −h − ω(γ')`.

use crate::area_variation::prescribed_along;
use crate::contact_chart::{
    nabla_frame_from, tau_apply, ChartPoint, FrameMetric, HorizontalVec, MetricField, DEFAULT_FD_STEP,
};
use crate::error::{Error, Result};
use crate::fields::{ScalarField, Var};
use crate::intrinsic_graph::{embed, mean_curvature_at, GraphFunction, GraphPoint, DEFAULT_CURVATURE_STEP};
use crate::stencil;

/// Curvature `h(s)` as a function of arclength.
#[derive(Debug, Clone)]
pub enum CurvatureProfile {
    Constant(f64),
    /// Expression in `s`.
    Field(ScalarField),
    /// Linear interpolation between samples; `s` strictly increasing.
    Samples { s: Vec<f64>, h: Vec<f64> },
}

impl CurvatureProfile {
    pub fn parse(source: &str) -> Result<Self> {
        let f = ScalarField::parse(source, &[Var::S])?;
        Ok(match f.as_constant() {
            Some(c) => CurvatureProfile::Constant(c),
            None => CurvatureProfile::Field(f),
        })
    }

    pub fn samples(s: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        if s.len() != h.len() || s.len() < 2 {
            return Err(Error::InvalidArgument(
                "curvature samples need at least two (s, h) pairs".into(),
            ));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("sample positions must increase".into()));
        }
        Ok(CurvatureProfile::Samples { s, h })
    }

    pub fn at(&self, s: f64) -> Result<f64> {
        match self {
            CurvatureProfile::Constant(c) => Ok(*c),
            CurvatureProfile::Field(f) => Ok(f.value_at(0.0, 0.0, 0.0, s)?),
            CurvatureProfile::Samples { s: xs, h } => {
                let n = xs.len();
                let k = xs.partition_point(|&v| v <= s).clamp(1, n - 1);
                let w = (s - xs[k - 1]) / (xs[k] - xs[k - 1]);
                Ok(h[k - 1] + w * (h[k] - h[k - 1]))
            }
        }
    }
}

/// Samples of a horizontal curve at `s_i = s0 + i · step`.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalCurve {
    pub s0: f64,
    pub step: f64,
    pub points: Vec<ChartPoint>,
    /// Tangent angle in `{e1, e2}`; for curves built from points it is read
    /// off the numerical tangent.
    pub theta: Vec<f64>,
    /// Curvature attached to each sample.
    pub h: Vec<f64>,
}

impl HorizontalCurve {
    /// Wraps externally produced samples; the angle comes from differencing.
    pub fn from_points(
        g: &MetricField,
        s0: f64,
        step: f64,
        points: Vec<ChartPoint>,
        h: Vec<f64>,
    ) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
        }
        if points.len() < 3 || h.len() != points.len() {
            return Err(Error::InvalidArgument(
                "a curve needs at least three samples with one curvature value each".into(),
            ));
        }
        let coords: Vec<[f64; 3]> = points.iter().map(|p| p.coords()).collect();
        let mut theta = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            let d = stencil::d1(&coords, i, step).unwrap_or_else(|| one_sided(&coords, i, step));
            theta.push(frame_angle(&g.at(p)?, (d[0], d[1])));
        }
        Ok(HorizontalCurve {
            s0,
            step,
            points,
            theta,
            h,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s0 + i as f64 * self.step
    }

    pub fn length(&self) -> f64 {
        self.step * (self.points.len().saturating_sub(1)) as f64
    }

    fn coords(&self) -> Vec<[f64; 3]> {
        self.points.iter().map(|p| p.coords()).collect()
    }

    /// Largest `|ω(γ')|` over samples with a fourth-order tangent.
    pub fn max_horizontality(&self) -> f64 {
        let c = self.coords();
        (0..c.len())
            .filter_map(|i| stencil::d1_fourth(&c, i, self.step).map(|d| (d[2] + c[i][0] * d[1]).abs()))
            .fold(0.0, f64::max)
    }

    /// Largest `| |γ'| − 1 |` from the numerical tangent.
    pub fn max_speed_drift(&self, g: &MetricField) -> Result<f64> {
        let c = self.coords();
        let mut worst: f64 = 0.0;
        for i in 0..c.len() {
            if let Some(d) = stencil::d1_fourth(&c, i, self.step) {
                let m = g.at(&self.points[i])?;
                worst = worst.max((m.norm((d[0], d[1])) - 1.0).abs());
            }
        }
        Ok(worst)
    }
}

fn one_sided(c: &[[f64; 3]], i: usize, h: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for k in 0..3 {
        let col: Vec<f64> = c.iter().map(|p| p[k]).collect();
        out[k] = stencil::derivative(&col, i, h);
    }
    out
}

/// Angle of `v` in the orthonormal frame at the metric's base point.
pub fn frame_angle(m: &FrameMetric, v: (f64, f64)) -> f64 {
    let (e1, e2) = m.orthonormal_frame();
    m.inner(v, e2).atan2(m.inner(v, e1))
}

fn geodesic_rhs(g: &MetricField, y: [f64; 4], h: f64) -> Result<[f64; 4]> {
    let p = ChartPoint::new(y[0], y[1], y[2]);
    let m = g.at(&p)?;
    let (e1, e2) = m.orthonormal_frame();
    let (sn, cs) = y[3].sin_cos();
    let v = (cs * e1.0 + sn * e2.0, cs * e1.1 + sn * e2.1);
    let conn = nabla_frame_from(&m)?;
    let nabla_x = conn.contract(v, (1.0, 0.0));
    let omega = e1.0 * m.inner(nabla_x, e2);
    Ok([v.0, v.1, -p.x * v.1, -h - omega])
}

/// RK4 on `(x, y, t, θ)` from `start` with initial angle `theta0`. The step
/// is shrunk slightly so that `length` is a whole number of steps.
pub fn integrate_geodesic(
    g: &MetricField,
    start: ChartPoint,
    theta0: f64,
    h: &CurvatureProfile,
    length: f64,
    step: f64,
) -> Result<HorizontalCurve> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidArgument(format!("length must be positive, got {length}")));
    }
    let n = (length / step).ceil().max(2.0) as usize;
    let dt = length / n as f64;
    let mut y = [start.x, start.y, start.t, theta0];
    let mut points = Vec::with_capacity(n + 1);
    let mut theta = Vec::with_capacity(n + 1);
    let mut hs = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let s = i as f64 * dt;
        points.push(ChartPoint::new(y[0], y[1], y[2]));
        theta.push(y[3]);
        hs.push(h.at(s)?);
        if i == n {
            break;
        }
        let hm = h.at(s + 0.5 * dt)?;
        let k1 = geodesic_rhs(g, y, hs[i])?;
        let k2 = geodesic_rhs(g, axpy(y, 0.5 * dt, k1), hm)?;
        let k3 = geodesic_rhs(g, axpy(y, 0.5 * dt, k2), hm)?;
        let k4 = geodesic_rhs(g, axpy(y, dt, k3), h.at(s + dt)?)?;
        for k in 0..4 {
            y[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        }
    }
    Ok(HorizontalCurve {
        s0: 0.0,
        step: dt,
        points,
        theta,
        h: hs,
    })
}

fn axpy<const N: usize>(y: [f64; N], a: f64, k: [f64; N]) -> [f64; N] {
    let mut out = y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

struct Kinematics {
    metric: FrameMetric,
    unit: (f64, f64),
    speed: f64,
    /// Normal part of `∇_γ'γ'` divided by `|γ'|²`.
    curvature: (f64, f64),
}

fn kinematics(curve: &HorizontalCurve, g: &MetricField, coords: &[[f64; 3]], i: usize) -> Result<Kinematics> {
    let (d, dd) = stencil::central(coords, i, curve.step);
    let m = g.at(&curve.points[i])?;
    let v = (d[0], d[1]);
    let speed = m.norm(v);
    if !(speed > 0.0) {
        return Err(Error::ZeroVector);
    }
    let conn = nabla_frame_from(&m)?;
    let c = conn.contract(v, v);
    let acc = (dd[0] + c.0, dd[1] + c.1);
    let unit = (v.0 / speed, v.1 / speed);
    let along = m.inner(acc, unit);
    let s2 = speed * speed;
    let curvature = ((acc.0 - along * unit.0) / s2, (acc.1 - along * unit.1) / s2);
    Ok(Kinematics {
        metric: m,
        unit,
        speed,
        curvature,
    })
}

fn require_samples(curve: &HorizontalCurve) -> Result<()> {
    if curve.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least three samples, got {}",
            curve.len()
        )));
    }
    Ok(())
}

/// `|∇_γ̇γ̇ + h j(γ̇)|` for the unit tangent `γ̇` at interior samples
/// `1..len−1`, from central differences of the positions alone. The
/// tangential part of the acceleration is removed, so any regular
/// parametrization works.
pub fn geodesic_residual(curve: &HorizontalCurve, g: &MetricField) -> Result<Vec<f64>> {
    require_samples(curve)?;
    let coords = curve.coords();
    (1..curve.len() - 1)
        .map(|i| {
            let k = kinematics(curve, g, &coords, i)?;
            let j = k.metric.j_unit(k.unit);
            let r = (k.curvature.0 + curve.h[i] * j.0, k.curvature.1 + curve.h[i] * j.1);
            Ok(k.metric.norm(r))
        })
        .collect()
}

/// The curvature `h` that would make each interior sample satisfy the
/// geodesic equation: `−⟨∇_γ̇γ̇, j(γ̇)⟩`.
pub fn implied_curvature(curve: &HorizontalCurve, g: &MetricField) -> Result<Vec<f64>> {
    require_samples(curve)?;
    let coords = curve.coords();
    (1..curve.len() - 1)
        .map(|i| {
            let k = kinematics(curve, g, &coords, i)?;
            Ok(-k.metric.inner(k.curvature, k.metric.j_unit(k.unit)))
        })
        .collect()
}

/// `γ̇(h) − g(τ(γ̇), γ̇)` at interior samples; zero along sub-Riemannian
/// geodesic candidates.
pub fn subriemannian_check(curve: &HorizontalCurve, g: &MetricField) -> Result<Vec<f64>> {
    require_samples(curve)?;
    let coords = curve.coords();
    (1..curve.len() - 1)
        .map(|i| {
            let k = kinematics(curve, g, &coords, i)?;
            let dh = (curve.h[i + 1] - curve.h[i - 1]) / (2.0 * curve.step) / k.speed;
            let v = HorizontalVec::new(curve.points[i], k.unit.0, k.unit.1);
            let tau = tau_apply(g, &v, DEFAULT_FD_STEP)?;
            Ok(dh - k.metric.inner((tau.a, tau.b), k.unit))
        })
        .collect()
}

/// Characteristic curve and the geodesic started from its initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicComparison {
    /// Arclength actually covered (shorter than requested if the
    /// characteristic leaves the domain).
    pub length: f64,
    pub step: f64,
    /// Parameter-plane samples of the characteristic, by arclength.
    pub params: Vec<(f64, f64)>,
    pub characteristic: Vec<ChartPoint>,
    /// `H` along the characteristic.
    pub mean_curvature: Vec<f64>,
    /// `f` along the characteristic.
    pub prescribed: Vec<f64>,
    /// Geodesic with curvature `H`.
    pub geodesic: HorizontalCurve,
    /// Sup chart distance between the characteristic and `geodesic`.
    pub sup_distance: f64,
    /// Sup chart distance to the geodesic of curvature `f`.
    pub sup_distance_prescribed: f64,
    pub max_curvature_gap: f64,
}

/// Characteristic through `q` by arclength: `(x, t)' = (1, u) / |Z̃|`.
fn characteristic_by_arclength(
    u: &GraphFunction,
    g: &MetricField,
    q: (f64, f64),
    n: usize,
    ds: f64,
) -> Result<Vec<(f64, f64)>> {
    let rhs = |p: [f64; 2]| -> Result<[f64; 2]> {
        let gp = GraphPoint::at(u, g, (p[0], p[1]))?;
        Ok([1.0 / gp.area_element, gp.jet.u / gp.area_element])
    };
    let mut y = [q.0, q.1];
    let mut out = vec![q];
    for _ in 0..n {
        let step = (|| -> Result<[f64; 2]> {
            let k1 = rhs(y)?;
            let k2 = rhs(axpy(y, 0.5 * ds, k1))?;
            let k3 = rhs(axpy(y, 0.5 * ds, k2))?;
            let k4 = rhs(axpy(y, ds, k3))?;
            Ok([
                y[0] + ds / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                y[1] + ds / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            ])
        })();
        match step {
            Ok(next) if u.domain.contains(next[0], next[1]) => {
                y = next;
                out.push((y[0], y[1]));
            }
            Ok(_) | Err(Error::OutsideDomain { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Integrates the characteristic through `q`, samples `H` on it, and
/// integrates the ∇-geodesic of curvature `H` from the same point and
/// direction. A second geodesic uses `f` instead of `H`.
pub fn compare_with_characteristic(
    u: &GraphFunction,
    g: &MetricField,
    f: &ScalarField,
    q: (f64, f64),
    length: f64,
    step: f64,
) -> Result<CharacteristicComparison> {
    if !(step > 0.0) || !(length > 0.0) {
        return Err(Error::InvalidArgument("length and step must be positive".into()));
    }
    if !u.domain.contains(q.0, q.1) {
        return Err(Error::OutsideDomain { x: q.0, t: q.1 });
    }
    let n = (length / step).ceil().max(2.0) as usize;
    let ds = length / n as f64;
    let params = characteristic_by_arclength(u, g, q, n, ds)?;
    if params.len() < 3 {
        return Err(Error::Degenerate("characteristic leaves the domain immediately".into()));
    }
    let covered = ds * (params.len() - 1) as f64;
    let characteristic: Vec<ChartPoint> =
        params.iter().map(|&p| embed(u, p)).collect::<Result<_>>()?;
    let mean_curvature: Vec<f64> = params
        .iter()
        .map(|&p| mean_curvature_at(u, g, p, DEFAULT_CURVATURE_STEP))
        .collect::<Result<_>>()?;
    let prescribed = prescribed_along(f, &characteristic)?;
    let s: Vec<f64> = (0..params.len()).map(|i| i as f64 * ds).collect();

    let gp = GraphPoint::at(u, g, q)?;
    let theta0 = frame_angle(&gp.metric, gp.z());
    let start = characteristic[0];
    let geodesic = integrate_geodesic(
        g,
        start,
        theta0,
        &CurvatureProfile::samples(s.clone(), mean_curvature.clone())?,
        covered,
        ds,
    )?;
    let by_f = integrate_geodesic(
        g,
        start,
        theta0,
        &CurvatureProfile::samples(s, prescribed.clone())?,
        covered,
        ds,
    )?;
    let sup = |c: &HorizontalCurve| {
        c.points
            .iter()
            .zip(&characteristic)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    };
    let max_curvature_gap = mean_curvature
        .iter()
        .zip(&prescribed)
        .map(|(h, f)| (h - f).abs())
        .fold(0.0, f64::max);
    Ok(CharacteristicComparison {
        length: covered,
        step: ds,
        params,
        sup_distance: sup(&geodesic),
        sup_distance_prescribed: sup(&by_f),
        characteristic,
        mean_curvature,
        prescribed,
        geodesic,
        max_curvature_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intrinsic_graph::GraphDomain;
    use std::f64::consts::PI;

    fn heis() -> MetricField {
        MetricField::heisenberg()
    }

    #[test]
    fn straight_line_from_origin() {
        let c = integrate_geodesic(&heis(), ChartPoint::new(0.0, 0.0, 0.0), 0.0, &CurvatureProfile::Constant(0.0), 1.0, 1e-2)
            .unwrap();
        for (i, p) in c.points.iter().enumerate() {
            let s = c.s(i);
            assert!((p.x - s).abs() < 1e-14 && p.y.abs() < 1e-14 && p.t.abs() < 1e-14);
        }
    }

    #[test]
    fn constant_angle_in_flat_case() {
        let theta0 = 0.7;
        let c = integrate_geodesic(&heis(), ChartPoint::new(0.2, -0.1, 0.3), theta0, &CurvatureProfile::Constant(0.0), 3.0, 1e-2)
            .unwrap();
        assert!(c.theta.iter().all(|th| (th - theta0).abs() <= 1e-10));
        let p0 = c.points[0];
        for (i, p) in c.points.iter().enumerate() {
            let s = c.s(i);
            let (x, y) = (p0.x + s * theta0.cos(), p0.y + s * theta0.sin());
            assert!((p.x - x).abs() < 1e-12 && (p.y - y).abs() < 1e-12);
            // t' = −x y'
            let t = p0.t - theta0.sin() * (p0.x * s + 0.5 * theta0.cos() * s * s);
            assert!((p.t - t).abs() < 1e-12);
        }
        assert!(c.max_horizontality() < 1e-12);
    }

    #[test]
    fn unit_circle_closes() {
        let c = integrate_geodesic(&heis(), ChartPoint::new(0.0, 0.0, 0.0), 0.0, &CurvatureProfile::Constant(1.0), 2.0 * PI, 1e-3)
            .unwrap();
        let end = c.points.last().unwrap();
        assert!(end.x.abs() < 1e-9 && end.y.abs() < 1e-9);
        // θ = −s: clockwise circle centred at (0, −1)
        for p in &c.points {
            assert!(((p.x).powi(2) + (p.y + 1.0).powi(2) - 1.0).abs() < 1e-9);
        }
        assert!(c.max_horizontality() < 1e-10, "{}", c.max_horizontality());
    }

    #[test]
    fn residual_of_line_is_zero() {
        let c = integrate_geodesic(&heis(), ChartPoint::new(0.0, 0.0, 0.0), 0.3, &CurvatureProfile::Constant(0.0), 1.0, 1e-2)
            .unwrap();
        let r = geodesic_residual(&c, &heis()).unwrap();
        assert_eq!(r.len(), c.len() - 2);
        assert!(r.iter().all(|v| *v <= 1e-10), "{:?}", r.iter().cloned().fold(0.0, f64::max));
    }

    #[test]
    fn wrong_curvature_is_detected() {
        let mut c = integrate_geodesic(&heis(), ChartPoint::new(0.0, 0.0, 0.0), 0.0, &CurvatureProfile::Constant(1.0), 1.0, 1e-3)
            .unwrap();
        c.h.iter_mut().for_each(|h| *h = 2.0);
        let r = geodesic_residual(&c, &heis()).unwrap();
        assert!(r.iter().all(|v| (v - 1.0).abs() < 1e-5));
        let k = implied_curvature(&c, &heis()).unwrap();
        assert!(k.iter().all(|v| (v - 1.0).abs() < 1e-5));
    }

    #[test]
    fn subriemannian_condition() {
        let c = integrate_geodesic(&heis(), ChartPoint::new(0.1, 0.2, 0.3), 0.4, &CurvatureProfile::Constant(0.8), 1.0, 1e-3)
            .unwrap();
        assert!(subriemannian_check(&c, &heis()).unwrap().iter().all(|v| v.abs() <= 1e-8));
        let c = integrate_geodesic(&heis(), ChartPoint::new(0.0, 0.0, 0.0), 0.0, &CurvatureProfile::parse("s").unwrap(), 1.0, 1e-3)
            .unwrap();
        assert!(subriemannian_check(&c, &heis()).unwrap().iter().all(|v| (v - 1.0).abs() <= 1e-6));
    }

    #[test]
    fn curved_metric_keeps_unit_speed() {
        let g = MetricField::from_sources("exp(0.4*y)", "0.1*x", "1 + 0.2*x^2").unwrap();
        let c = integrate_geodesic(&g, ChartPoint::new(0.1, 0.0, 0.0), 0.5, &CurvatureProfile::Constant(0.3), 2.0, 1e-3)
            .unwrap();
        assert!(c.max_speed_drift(&g).unwrap() < 1e-8, "{}", c.max_speed_drift(&g).unwrap());
        assert!(c.max_horizontality() < 1e-8);
        let r = geodesic_residual(&c, &g).unwrap();
        assert!(r.iter().cloned().fold(0.0, f64::max) < 1e-5);
    }

    #[test]
    fn profiles() {
        let p = CurvatureProfile::samples(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(p.at(0.5).unwrap(), 1.0);
        assert_eq!(p.at(2.0).unwrap(), 1.0);
        assert!(CurvatureProfile::samples(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(matches!(CurvatureProfile::parse("2").unwrap(), CurvatureProfile::Constant(c) if c == 2.0));
        assert!(integrate_geodesic(&heis(), ChartPoint::new(0.0, 0.0, 0.0), 0.0, &p, 1.0, 0.0).is_err());
    }

    #[test]
    fn planes_follow_their_characteristics() {
        let d = GraphDomain::new(-2.0, 3.0, -3.0, 3.0).unwrap();
        let f = crate::area_variation::zero_curvature();
        for src in ["0.5*x", "0.3", "-1.2*x + 0.4"] {
            let u = GraphFunction::from_expr(src, d).unwrap();
            let r = compare_with_characteristic(&u, &heis(), &f, (0.1, 0.2), 1.0, 1e-3).unwrap();
            assert!((r.length - 1.0).abs() < 1e-12);
            assert!(r.sup_distance <= 1e-6, "{src}: {}", r.sup_distance);
            assert!(r.max_curvature_gap <= 1e-6);
        }
    }
}
