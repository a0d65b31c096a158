//! Characteristic curves of intrinsic graphs: solutions of `t'(s) = u(s, t(s))`
//! in the parameter plane, their lifts `Γ(s) = Φ(s, t(s))`, families
//! `t_ε` with `t_ε(a) = b + ε`, and mean curvature along the lifts.

use rayon::prelude::*;

use crate::area_variation::prescribed_along;
use crate::contact_chart::{nabla_frame_from, ChartPoint, MetricField};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geodesics::{geodesic_residual, HorizontalCurve};
use crate::intrinsic_graph::{embed_jet, GraphFunction, GraphPoint};
use crate::stencil;

pub const DEFAULT_STEP: f64 = 1e-3;

/// Samples `(s_i, t(s_i))` with `s_i = a + (i − origin) · step`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharCurve {
    pub a: f64,
    pub b: f64,
    pub step: f64,
    /// Index of the sample at `s = a`.
    pub origin: usize,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub lifted: Vec<ChartPoint>,
    /// Set when integration stopped at the domain boundary before reaching
    /// the requested end on either side.
    pub truncated: bool,
}

impl CharCurve {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Largest `|t' − u(s, t)|` with `t'` from a fourth-order stencil.
    pub fn ode_residual(&self, u: &GraphFunction) -> Result<f64> {
        let col: Vec<[f64; 1]> = self.t.iter().map(|&t| [t]).collect();
        let mut worst: f64 = 0.0;
        for i in 0..col.len() {
            if let Some(d) = stencil::d1_fourth(&col, i, self.step) {
                worst = worst.max((d[0] - u.value(self.s[i], self.t[i])?).abs());
            }
        }
        Ok(worst)
    }

    /// Largest T-component `|ω(Γ')|` of the numerical tangent of the lift.
    pub fn horizontality(&self) -> f64 {
        let c: Vec<[f64; 3]> = self.lifted.iter().map(|p| p.coords()).collect();
        (0..c.len())
            .filter_map(|i| stencil::d1_fourth(&c, i, self.step).map(|d| (d[2] + c[i][0] * d[1]).abs()))
            .fold(0.0, f64::max)
    }
}

fn rk4_step(u: &GraphFunction, s: f64, t: f64, h: f64) -> Result<f64> {
    let k1 = u.value(s, t)?;
    let k2 = u.value(s + 0.5 * h, t + 0.5 * h * k1)?;
    let k3 = u.value(s + 0.5 * h, t + 0.5 * h * k2)?;
    let k4 = u.value(s + h, t + h * k3)?;
    Ok(t + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// Marches from `(a, b)` for `n` steps of signed size `h`; returns the
/// accepted values and whether the march stopped at the boundary.
fn march(u: &GraphFunction, a: f64, b: f64, h: f64, n: usize) -> Result<(Vec<f64>, bool)> {
    let mut out = Vec::with_capacity(n);
    let mut t = b;
    for k in 0..n {
        let s = a + k as f64 * h;
        match rk4_step(u, s, t, h) {
            Ok(next) if u.domain.contains(s + h, next) => {
                t = next;
                out.push(t);
            }
            Ok(_) | Err(Error::OutsideDomain { .. }) => return Ok((out, true)),
            Err(e) => return Err(e),
        }
    }
    Ok((out, false))
}

/// Classical RK4 through `(a, b)` over `s_range = (s_min, s_max)` at fixed
/// `step`. Both ends are rounded inward to the step lattice through `a`;
/// the curve is cut where it leaves the domain.
pub fn integrate_characteristic(
    u: &GraphFunction,
    start: (f64, f64),
    s_range: (f64, f64),
    step: f64,
) -> Result<CharCurve> {
    let (a, b) = start;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !u.domain.contains(a, b) {
        return Err(Error::OutsideDomain { x: a, t: b });
    }
    if !(s_range.0 <= a && a <= s_range.1) {
        return Err(Error::InvalidArgument(format!(
            "start {a} lies outside the range [{}, {}]",
            s_range.0, s_range.1
        )));
    }
    let lattice = |span: f64| (span / step + 1e-9).floor() as usize;
    let (back, cut_back) = march(u, a, b, -step, lattice(a - s_range.0))?;
    let (fwd, cut_fwd) = march(u, a, b, step, lattice(s_range.1 - a))?;
    let origin = back.len();
    let t: Vec<f64> = back.into_iter().rev().chain(std::iter::once(b)).chain(fwd).collect();
    let s: Vec<f64> = (0..t.len())
        .map(|i| a + (i as f64 - origin as f64) * step)
        .collect();
    let lifted = s
        .iter()
        .zip(&t)
        .map(|(&s, &t)| Ok(embed_jet(s, t, u.value(s, t)?)))
        .collect::<Result<_>>()?;
    Ok(CharCurve {
        a,
        b,
        step,
        origin,
        s,
        t,
        lifted,
        truncated: cut_back || cut_fwd,
    })
}

/// Curves `t_ε` through `(a, b + ε)` for increasing `ε`, truncated to their
/// common sample range.
#[derive(Debug, Clone, PartialEq)]
pub struct FoliationFamily {
    pub eps: Vec<f64>,
    pub curves: Vec<CharCurve>,
    /// Common parameter samples.
    pub s: Vec<f64>,
    /// `∂t_ε/∂ε` per member and common sample: central differences between
    /// neighbours, one-sided for the first and last member.
    pub dt_deps: Vec<Vec<f64>>,
}

impl FoliationFamily {
    /// `t_ε(s_i)` of member `k` on the common samples.
    pub fn t_common(&self, k: usize) -> &[f64] {
        let c = &self.curves[k];
        let lo = c.origin - self.offset_back();
        &c.t[lo..lo + self.s.len()]
    }

    fn offset_back(&self) -> usize {
        self.curves.iter().map(|c| c.origin).min().unwrap_or(0)
    }

    pub fn min_dt_deps(&self) -> f64 {
        self.dt_deps.iter().flatten().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `min_s (t_{ε_{k+1}} − t_{ε_k})` over neighbouring members.
    pub fn min_gap(&self) -> f64 {
        (1..self.curves.len())
            .flat_map(|k| {
                let (lo, hi) = (self.t_common(k - 1), self.t_common(k));
                lo.iter().zip(hi).map(|(a, b)| b - a).collect::<Vec<_>>()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn foliate_family(
    u: &GraphFunction,
    a: f64,
    b: f64,
    eps: &[f64],
    s_range: (f64, f64),
    step: f64,
) -> Result<FoliationFamily> {
    if eps.len() < 2 {
        return Err(Error::InvalidArgument("a family needs at least two members".into()));
    }
    if eps.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("ε values must be strictly increasing".into()));
    }
    if let Some(e) = eps.iter().find(|&&e| !u.domain.contains(a, b + e)) {
        return Err(Error::OutsideDomain { x: a, t: b + e });
    }
    let curves: Vec<CharCurve> = eps
        .par_iter()
        .map(|&e| integrate_characteristic(u, (a, b + e), s_range, step))
        .collect::<Result<_>>()?;
    let back = curves.iter().map(|c| c.origin).min().unwrap_or(0);
    let fwd = curves.iter().map(|c| c.len() - c.origin).min().unwrap_or(0);
    let s: Vec<f64> = (0..back + fwd)
        .map(|i| a + (i as f64 - back as f64) * step)
        .collect();
    let mut fam = FoliationFamily {
        eps: eps.to_vec(),
        curves,
        s,
        dt_deps: Vec::new(),
    };
    let n = fam.eps.len();
    fam.dt_deps = (0..n)
        .map(|k| {
            let (lo, hi) = (k.saturating_sub(1), (k + 1).min(n - 1));
            let de = fam.eps[hi] - fam.eps[lo];
            fam.t_common(hi)
                .iter()
                .zip(fam.t_common(lo))
                .map(|(p, m)| (p - m) / de)
                .collect()
        })
        .collect();
    Ok(fam)
}

/// `H = ⟨∇_Z Z, ν_h⟩` at every sample of `curve`. `Z` is differenced over
/// the curve samples (second order, one-sided at the ends), so `u` must
/// be twice differentiable along the curve. Grid-backed `u` is rejected;
/// use [`mean_curvature_along_smoothed`].
pub fn mean_curvature_along(u: &GraphFunction, g: &MetricField, curve: &CharCurve) -> Result<Vec<f64>> {
    if !u.is_smooth() {
        return Err(Error::InvalidArgument(
            "grid-backed graphs need a smoothing window".into(),
        ));
    }
    curvature_samples(u, g, curve)
}

/// As [`mean_curvature_along`], followed by a centred moving average over
/// `window` samples (odd). Intended for grid-backed `u`, whose interpolant
/// has second derivatives that jump across cells.
pub fn mean_curvature_along_smoothed(
    u: &GraphFunction,
    g: &MetricField,
    curve: &CharCurve,
    window: usize,
) -> Result<Vec<f64>> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("window must be odd, got {window}")));
    }
    Ok(stencil::moving_average(&curvature_samples(u, g, curve)?, window))
}

/// Odd window spanning about one grid cell along `s`; 1 for expressions.
pub fn default_window(u: &GraphFunction, step: f64) -> usize {
    match u.as_grid() {
        Some(grid) => {
            let w = (grid.spacing().0 / step).round() as usize;
            w | 1
        }
        None => 1,
    }
}

fn curvature_samples(u: &GraphFunction, g: &MetricField, curve: &CharCurve) -> Result<Vec<f64>> {
    if curve.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "curve has {} samples, need at least 3",
            curve.len()
        )));
    }
    let pts: Vec<GraphPoint> = curve
        .s
        .iter()
        .zip(&curve.t)
        .map(|(&s, &t)| GraphPoint::at(u, g, (s, t)))
        .collect::<Result<_>>()?;
    let za: Vec<f64> = pts.iter().map(|p| p.z().0).collect();
    let zb: Vec<f64> = pts.iter().map(|p| p.z().1).collect();
    pts.iter()
        .enumerate()
        .map(|(i, gp)| {
            // d/ds along the lift is Z̃ = |Z̃| Z
            let r = gp.area_element;
            let dz = (
                stencil::derivative(&za, i, curve.step) / r,
                stencil::derivative(&zb, i, curve.step) / r,
            );
            let z = gp.z();
            let c = nabla_frame_from(&gp.metric)?.contract(z, z);
            Ok(gp.metric.inner((dz.0 + c.0, dz.1 + c.1), gp.nu_h()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessReport {
    /// Largest jump of the second difference of the lift between
    /// neighbouring stencils, over the three coordinates.
    pub second_difference_jump: f64,
    /// Largest geodesic residual with curvature `H` along the curve.
    pub geodesic_residual: f64,
    /// Largest geodesic residual with curvature `f`, when given.
    pub prescribed_residual: Option<f64>,
    pub mean_curvature: Vec<f64>,
}

/// C² diagnostic of a lifted characteristic. Grid-backed graphs use
/// [`default_window`] for the curvature samples.
pub fn smoothness_report(
    curve: &CharCurve,
    u: &GraphFunction,
    g: &MetricField,
    f: Option<&ScalarField>,
) -> Result<SmoothnessReport> {
    let h = if u.is_smooth() {
        mean_curvature_along(u, g, curve)?
    } else {
        mean_curvature_along_smoothed(u, g, curve, default_window(u, curve.step))?
    };
    let c: Vec<[f64; 3]> = curve.lifted.iter().map(|p| p.coords()).collect();
    let second: Vec<[f64; 3]> = (1..c.len().saturating_sub(1))
        .map(|i| stencil::central(&c, i, curve.step).1)
        .collect();
    let second_difference_jump = second
        .windows(2)
        .flat_map(|w| (0..3).map(move |k| (w[1][k] - w[0][k]).abs()))
        .fold(0.0, f64::max);
    let max = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);
    let lifted = HorizontalCurve::from_points(g, curve.s[0], curve.step, curve.lifted.clone(), h.clone())?;
    let geodesic_residual = max(geodesic_residual(&lifted, g)?);
    let prescribed_residual = match f {
        Some(f) => {
            let hf = prescribed_along(f, &curve.lifted)?;
            let c = HorizontalCurve { h: hf, ..lifted };
            Some(max(crate::geodesics::geodesic_residual(&c, g)?))
        }
        None => None,
    };
    Ok(SmoothnessReport {
        second_difference_jump,
        geodesic_residual,
        prescribed_residual,
        mean_curvature: h,
    })
}
