//! One function per subcommand. Each writes its CSV artifacts into the
//! output directory and fills the report; the caller writes the report.

use std::path::Path;

use srmc_core::area_variation::{self, geometric_first_variation, variation_report, Bump};
use srmc_core::foliation::{self, default_window, foliate_family, mean_curvature_along_smoothed};
use srmc_core::geodesics::{compare_with_characteristic, geodesic_residual, integrate_geodesic};
use srmc_core::intrinsic_graph::{area_element, zx_check};
use srmc_core::minimizer::{minimize_intrinsic, minimize_tgraph};
use srmc_core::{
    CharCurve, ChartPoint, GraphFunction, GridField, MetricField, Quadrature, SolveReport,
};

use crate::config::{Loaded, Problem};
use crate::error::CliError;
use crate::grid_csv;
use crate::output::{CsvOut, Report};

const DEFAULT_FAMILY: [f64; 5] = [-2e-3, -1e-3, 0.0, 1e-3, 2e-3];

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().map(f64::abs).fold(0.0, f64::max)
}

/// Area and the area element on the sampling grid.
pub fn area(l: &Loaded, rep: &mut Report, dir: &Path) -> Result<(), CliError> {
    let p = l.problem()?;
    let a = area_variation::area(&p.u, &p.metric, &p.quadrature)?;
    rep.value("value", a);
    rep.value("domain_area", p.domain.area());
    let [nx, nt] = l.config.samples;
    if nx < 2 || nt < 2 {
        return Err(CliError::Validation("config field `samples`: need at least 2x2".into()));
    }
    let mut out = CsvOut::create(&rep.artifact(dir, "area.csv"), None, &["x", "t", "u", "area_element"])?;
    for i in 0..nx {
        for j in 0..nt {
            let x = p.domain.x0 + (p.domain.x1 - p.domain.x0) * i as f64 / (nx - 1) as f64;
            let t = p.domain.t0 + (p.domain.t1 - p.domain.t0) * j as f64 / (nt - 1) as f64;
            out.row(&[x, t, p.u.value(x, t)?, area_element(&p.u, (x, t), &p.metric)?])?;
        }
    }
    out.finish()
}

struct VariationRow {
    bump: Bump,
    formula: f64,
    oracle: f64,
    abs_gap: f64,
    rel_gap: f64,
    geometric: f64,
    within: bool,
}

fn variation_rows(l: &Loaded, p: &Problem) -> Result<Vec<VariationRow>, CliError> {
    let spec = l.config.variation;
    if spec.bumps == 0 || !(spec.fill > 0.0 && spec.fill <= 1.0) || !(spec.fd_step > 0.0) {
        return Err(CliError::Validation(
            "config field `variation`: need bumps ≥ 1, 0 < fill ≤ 1, fd_step > 0".into(),
        ));
    }
    let tol = l.config.check;
    Bump::lattice(&p.domain, spec.bumps, spec.fill)
        .into_iter()
        .map(|b| {
            let r = variation_report(&p.u, &b, &p.f, &p.metric, &p.quadrature, spec.fd_step)?;
            let geometric = geometric_first_variation(&p.u, &b, &p.f, &p.metric, &p.quadrature)?;
            Ok(VariationRow {
                bump: b,
                formula: r.formula,
                oracle: r.oracle,
                abs_gap: r.abs_gap,
                rel_gap: r.rel_gap,
                geometric,
                within: r.within(tol.variation_abs, tol.variation_rel),
            })
        })
        .collect()
}

/// First variation against a lattice of bumps, with the finite-difference
/// oracle and the geometric form alongside.
pub fn variation(l: &Loaded, rep: &mut Report, dir: &Path) -> Result<(), CliError> {
    let p = l.problem()?;
    let rows = variation_rows(l, &p)?;
    let mut out = CsvOut::create(
        &rep.artifact(dir, "variation.csv"),
        None,
        &["bump", "cx", "ct", "rx", "rt", "formula", "oracle", "abs_gap", "rel_gap", "geometric"],
    )?;
    for (k, r) in rows.iter().enumerate() {
        let b = r.bump;
        out.row_mixed(
            &[k.to_string()],
            &[b.cx, b.ct, b.rx, b.rt, r.formula, r.oracle, r.abs_gap, r.rel_gap, r.geometric],
        )?;
    }
    out.finish()?;
    rep.value("value", max_abs(rows.iter().map(|r| r.formula)));
    rep.value("bumps", rows.len());
    rep.residual("max_abs_gap", rows.iter().map(|r| r.abs_gap).fold(0.0, f64::max));
    rep.residual("max_rel_gap", rows.iter().map(|r| r.rel_gap).fold(0.0, f64::max));
    rep.residual(
        "max_geometric_gap",
        rows.iter().map(|r| (r.geometric - r.formula).abs()).fold(0.0, f64::max),
    );
    Ok(())
}

/// `H` along a characteristic, smoothed over about one cell for grids.
fn curvature_on(u: &GraphFunction, g: &MetricField, c: &CharCurve) -> Result<Vec<f64>, CliError> {
    Ok(if u.is_smooth() {
        foliation::mean_curvature_along(u, g, c)?
    } else {
        mean_curvature_along_smoothed(u, g, c, default_window(u, c.step))?
    })
}

/// Signed sub-Riemannian arclength from the base point of `c`.
fn arclength(u: &GraphFunction, g: &MetricField, c: &CharCurve) -> Result<Vec<f64>, CliError> {
    let r: Vec<f64> = c
        .s
        .iter()
        .zip(&c.t)
        .map(|(&x, &t)| area_element(u, (x, t), g))
        .collect::<srmc_core::Result<_>>()?;
    let mut acc = vec![0.0; r.len()];
    for i in c.origin + 1..r.len() {
        acc[i] = acc[i - 1] + 0.5 * c.step * (r[i] + r[i - 1]);
    }
    for i in (0..c.origin).rev() {
        acc[i] = acc[i + 1] - 0.5 * c.step * (r[i] + r[i + 1]);
    }
    Ok(acc)
}

/// Families of characteristics through `(a, b + ε)`.
pub fn foliate(l: &Loaded, rep: &mut Report, dir: &Path) -> Result<(), CliError> {
    let p = l.problem()?;
    let spec = &l.config.foliate;
    let d = p.domain;
    let seeds = match &spec.seeds {
        Some(s) => s.iter().map(|q| (q[0], q[1])).collect(),
        None => vec![(0.5 * (d.x0 + d.x1), 0.5 * (d.t0 + d.t1))],
    };
    let eps = spec.eps.clone().unwrap_or_else(|| DEFAULT_FAMILY.to_vec());
    let s_range = spec.s_range.map(|r| (r[0], r[1])).unwrap_or((d.x0, d.x1));
    let step = spec.step.unwrap_or(foliation::DEFAULT_STEP);

    let mut out = CsvOut::create(
        &rep.artifact(dir, "foliate.csv"),
        None,
        &["seed", "member", "eps", "s", "x", "t_param", "x_emb", "y_emb", "t_emb", "H"],
    )?;
    let (mut min_deriv, mut min_gap, mut worst_ode, mut worst_horiz) = (f64::INFINITY, f64::INFINITY, 0.0, 0.0);
    let mut truncated = 0usize;
    for (k, &(a, b)) in seeds.iter().enumerate() {
        let fam = foliate_family(&p.u, a, b, &eps, s_range, step)?;
        min_deriv = min_deriv.min(fam.min_dt_deps());
        min_gap = min_gap.min(fam.min_gap());
        for (m, c) in fam.curves.iter().enumerate() {
            truncated += c.truncated as usize;
            worst_ode = f64::max(worst_ode, c.ode_residual(&p.u)?);
            worst_horiz = f64::max(worst_horiz, c.horizontality());
            let h = curvature_on(&p.u, &p.metric, c)?;
            let arc = arclength(&p.u, &p.metric, c)?;
            for i in 0..c.len() {
                let q = c.lifted[i];
                out.row_mixed(
                    &[k.to_string(), m.to_string()],
                    &[fam.eps[m], arc[i], c.s[i], c.t[i], q.x, q.y, q.t, h[i]],
                )?;
            }
        }
    }
    out.finish()?;
    rep.value("seeds", seeds.len());
    rep.value("min_dt_deps", min_deriv);
    rep.value("min_gap", min_gap);
    rep.value("truncated_curves", truncated);
    rep.residual("max_ode_residual", worst_ode);
    rep.residual("max_horizontality", worst_horiz);
    if !(min_deriv > 0.0 && min_gap > 0.0) {
        return Err(CliError::Numerical("family members are not ordered".into()));
    }
    Ok(())
}

/// One ∇-geodesic of prescribed curvature.
pub fn geodesic(l: &Loaded, rep: &mut Report, dir: &Path) -> Result<(), CliError> {
    let g = l.metric()?;
    let profile = l.profile()?;
    let spec = &l.config.geodesic;
    let [x, y, t] = spec.start;
    let c = integrate_geodesic(&g, ChartPoint::new(x, y, t), spec.theta, &profile, spec.length, spec.step)?;
    let res = geodesic_residual(&c, &g)?;
    let mut out = CsvOut::create(
        &rep.artifact(dir, "geodesic.csv"),
        None,
        &["s", "x", "y", "t", "theta", "h", "residual"],
    )?;
    for i in 0..c.len() {
        let p = c.points[i];
        // the residual uses central differences, so the end samples have none
        let r = if i == 0 || i + 1 == c.len() { f64::NAN } else { res[i - 1] };
        out.row(&[c.s(i), p.x, p.y, p.t, c.theta[i], c.h[i], r])?;
    }
    out.finish()?;
    let end = c.points[c.len() - 1];
    rep.value("end", [end.x, end.y, end.t]);
    rep.value("length", c.length());
    rep.residual("max_residual", res.iter().cloned().fold(0.0, f64::max));
    rep.residual("max_horizontality", c.max_horizontality());
    rep.residual("max_speed_drift", c.max_speed_drift(&g)?);
    Ok(())
}

struct SeedComparison {
    sup_distance: f64,
    sup_distance_prescribed: f64,
    curvature_gap: f64,
    zx: f64,
}

fn compare_seeds(
    l: &Loaded,
    p: &Problem,
    mut csv: Option<&mut CsvOut>,
) -> Result<Vec<SeedComparison>, CliError> {
    let spec = &l.config.curvature;
    let mut out = Vec::new();
    for (k, q) in l.seeds(&p.domain).into_iter().enumerate() {
        let c = compare_with_characteristic(&p.u, &p.metric, &p.f, q, spec.length, spec.step)?;
        if let Some(w) = csv.as_deref_mut() {
            for i in 0..c.params.len() {
                let (x, t) = c.params[i];
                let e = c.characteristic[i];
                let gap = c.geodesic.points.get(i).map_or(f64::NAN, |gp| gp.distance(&e));
                w.row_mixed(
                    &[k.to_string()],
                    &[
                        i as f64 * c.step,
                        x,
                        t,
                        e.x,
                        e.y,
                        e.t,
                        c.mean_curvature[i],
                        c.prescribed[i],
                        gap,
                    ],
                )?;
            }
        }
        out.push(SeedComparison {
            sup_distance: c.sup_distance,
            sup_distance_prescribed: c.sup_distance_prescribed,
            curvature_gap: c.max_curvature_gap,
            zx: zx_check(&p.u, q, &p.metric)?.residual(),
        });
    }
    Ok(out)
}

/// Mean curvature along characteristics through the seeds, compared with
/// `f` and with the geodesic of curvature `H`.
pub fn curvature(l: &Loaded, rep: &mut Report, dir: &Path) -> Result<(), CliError> {
    let p = l.problem()?;
    let mut out = CsvOut::create(
        &rep.artifact(dir, "curvature.csv"),
        None,
        &["seed", "s", "x", "t_param", "x_emb", "y_emb", "t_emb", "H", "f", "geodesic_gap"],
    )?;
    let rows = compare_seeds(l, &p, Some(&mut out))?;
    out.finish()?;
    rep.value("seeds", rows.len());
    rep.value("max_abs_h_minus_f", rows.iter().map(|r| r.curvature_gap).fold(0.0, f64::max));
    rep.residual("sup_distance", rows.iter().map(|r| r.sup_distance).fold(0.0, f64::max));
    rep.residual(
        "sup_distance_prescribed",
        rows.iter().map(|r| r.sup_distance_prescribed).fold(0.0, f64::max),
    );
    rep.residual("max_zx", rows.iter().map(|r| r.zx).fold(0.0, f64::max));
    Ok(())
}

fn write_history(rep: &mut Report, dir: &Path, name: &str, r: &SolveReport) -> Result<(), CliError> {
    let mut out = CsvOut::create(&rep.artifact(dir, name), None, &["iteration", "stage", "eps", "energy"])?;
    for (k, &e) in r.energy_history.iter().enumerate() {
        let stage = r.stage_starts.partition_point(|&s| s <= k).saturating_sub(1);
        let eps = r.eps_schedule.get(stage).copied().unwrap_or(0.0);
        out.row_mixed(&[k.to_string(), stage.to_string()], &[eps, e])?;
    }
    out.finish()
}

fn solve_outcome(rep: &mut Report, r: &SolveReport) -> Result<(), CliError> {
    rep.value("energy", r.energy_history.last().copied().unwrap_or(f64::NAN));
    rep.value("iterations", r.iterations);
    rep.value("converged", r.converged);
    rep.value("monotone", r.is_monotone());
    rep.residual("gradient", r.residual);
    if r.converged {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "descent stopped after {} steps with residual {:e}",
            r.iterations, r.residual
        )))
    }
}

fn grid_shape(l: &Loaded) -> Result<(usize, usize), CliError> {
    let [nx, nt] = l.config.minimize.nodes;
    if nx < 3 || nt < 3 {
        return Err(CliError::Validation("config field `minimize.nodes`: need at least 3x3".into()));
    }
    Ok((nx, nt))
}

/// Critical point of the prescribed-curvature functional for intrinsic
/// graphs with boundary values taken from `u`.
pub fn minimize_intrinsic_cmd(l: &Loaded, rep: &mut Report, dir: &Path) -> Result<(), CliError> {
    let p = l.problem()?;
    let (nx, nt) = grid_shape(l)?;
    let mut boundary = Vec::with_capacity(nx * nt);
    let start = GridField::from_fn(p.domain, nx, nt, |_, _| 0.0)?;
    for i in 0..nx {
        for j in 0..nt {
            let (x, t) = start.grid.node(i, j);
            boundary.push(if start.is_boundary(i, j) { p.u.value(x, t)? } else { 0.0 });
        }
    }
    let mut field = start;
    field.grid.values = boundary;
    let spec = &l.config.minimize;
    if !(1..=32).contains(&spec.order) {
        return Err(CliError::Validation("config field `minimize.order`: must be in 1..=32".into()));
    }
    let quad = Quadrature::aligned(&field.grid, spec.order);
    let (solution, report) = minimize_intrinsic(&field, &p.metric, &p.f, &quad, &spec.options())?;
    grid_csv::write(&rep.artifact(dir, "minimize-intrinsic.csv"), &solution.grid, "t")?;
    write_history(rep, dir, "minimize-intrinsic_history.csv", &report)?;
    solve_outcome(rep, &report)
}

/// Critical point of the ε-regularized t-graph functional with boundary
/// values from `minimize.boundary`.
pub fn minimize_tgraph_cmd(l: &Loaded, rep: &mut Report, dir: &Path) -> Result<(), CliError> {
    let d = l.domain()?;
    let f = l.prescribed_tgraph()?;
    let bnd = l.tgraph_boundary()?;
    let (nx, ny) = grid_shape(l)?;
    let mut field = GridField::from_fn(d, nx, ny, |_, _| 0.0)?;
    for i in 0..nx {
        for j in 0..ny {
            if field.is_boundary(i, j) {
                let (x, y) = field.grid.node(i, j);
                field.grid.values[i * ny + j] = bnd.value_at(x, y, 0.0, 0.0).map_err(srmc_core::Error::from)?;
            }
        }
    }
    let spec = &l.config.minimize;
    let (solution, report) = minimize_tgraph(&field, &f, &spec.eps_schedule, &spec.options())?;
    grid_csv::write(&rep.artifact(dir, "minimize-tgraph.csv"), &solution.grid, "y")?;
    write_history(rep, dir, "minimize-tgraph_history.csv", &report)?;
    solve_outcome(rep, &report)
}

/// One line of the check table.
pub struct CheckLine {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Invariant suite on the configured problem: the first-variation formula
/// against its oracle, characteristics against geodesics, and `H = f`.
pub fn check(l: &Loaded, rep: &mut Report, dir: Option<&Path>) -> Result<Vec<CheckLine>, CliError> {
    let p = l.problem()?;
    let tol = l.config.check;
    let rows = variation_rows(l, &p)?;
    let seeds = compare_seeds(l, &p, None)?;
    let worst_rel = rows
        .iter()
        .filter(|r| r.abs_gap > tol.variation_abs)
        .map(|r| r.rel_gap)
        .fold(0.0, f64::max);
    let sup = seeds.iter().map(|r| r.sup_distance).fold(0.0, f64::max);
    let gap = seeds.iter().map(|r| r.curvature_gap).fold(0.0, f64::max);
    let lines = vec![
        CheckLine {
            name: "first variation vs oracle",
            value: worst_rel,
            tolerance: tol.variation_rel,
            pass: rows.iter().all(|r| r.within),
        },
        CheckLine {
            name: "characteristic vs geodesic",
            value: sup,
            tolerance: tol.geodesic,
            pass: sup <= tol.geodesic,
        },
        CheckLine {
            name: "H = f",
            value: gap,
            tolerance: tol.curvature,
            pass: gap <= tol.curvature,
        },
    ];
    for c in &lines {
        rep.residual(c.name, c.value);
    }
    rep.value("passed", lines.iter().filter(|c| c.pass).count());
    rep.value("checks", lines.len());
    if let Some(dir) = dir {
        let mut out = CsvOut::create(&rep.artifact(dir, "check.csv"), None, &["check", "pass", "value", "tolerance"])?;
        for c in &lines {
            out.row_mixed(&[c.name.to_string(), c.pass.to_string()], &[c.value, c.tolerance])?;
        }
        out.finish()?;
    }
    Ok(lines)
}
