use proptest::prelude::*;

use srmc_core::contact_chart::{
    levi_civita_coord, nabla_frame, nabla_reeb, tau_apply, ChartPoint, HorizontalVec, MetricField,
    DEFAULT_FD_STEP,
};
use srmc_core::fields::{parse, ScalarField, Var};
use srmc_core::foliation::foliate_family;
use srmc_core::geodesics::{integrate_geodesic, CurvatureProfile};
use srmc_core::intrinsic_graph::{zx_check, GraphDomain, GraphFunction, GraphPoint, GridData};

/// Expressions that stay finite and smooth on `[-1, 1]³`.
fn smooth_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        Just("t".to_string()),
        (-2.0..2.0f64).prop_map(|c| format!("{c:.3}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} / (2 + sin({b})))")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(tanh({a}))")),
            inner.clone().prop_map(|a| format!("sqrt(1 + ({a})^2)")),
            inner.clone().prop_map(|a| format!("({a})^3")),
            inner.prop_map(|a| format!("-{a}")),
        ]
    })
}

fn heis_like_metric() -> impl Strategy<Value = MetricField> {
    (0.5..2.0f64, -0.3..0.3f64, 0.5..2.0f64, -0.3..0.3f64, -0.3..0.3f64).prop_map(|(a, b, c, d, e)| {
        MetricField::from_sources(
            &format!("{a} + {d}*sin(x + y)"),
            &format!("{b}*cos(t)"),
            &format!("{c} + {e}*x*y"),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dual_numbers_match_finite_differences(
        src in smooth_expr(),
        x in -1.0..1.0f64,
        y in -1.0..1.0f64,
        t in -1.0..1.0f64,
    ) {
        let f = ScalarField::parse(&src, &[Var::X, Var::Y, Var::T]).unwrap();
        let d = f.dual_at(x, y, t, 0.0).unwrap();
        let h = 1e-5;
        let at = |p: [f64; 3]| f.value_at(p[0], p[1], p[2], 0.0).unwrap();
        for (k, var) in [Var::X, Var::Y, Var::T].into_iter().enumerate() {
            let mut p = [x, y, t];
            let mut m = [x, y, t];
            p[k] += h;
            m[k] -= h;
            let fd = (at(p) - at(m)) / (2.0 * h);
            let ad = d.partial(var);
            prop_assert!((fd - ad).abs() <= 1e-6 * ad.abs().max(1.0), "{src}: d/d{} {ad} vs {fd}", var.name());
        }
    }

    #[test]
    fn printing_round_trips(src in smooth_expr()) {
        let e = parse(&src).unwrap();
        let again = parse(&e.to_string()).unwrap();
        prop_assert_eq!(&e, &again);
        prop_assert_eq!(e.to_string(), again.to_string());
    }

    #[test]
    fn characteristic_identities(
        g in heis_like_metric(),
        a in -1.0..1.0f64,
        b in -1.0..1.0f64,
        x in -0.9..0.9f64,
        t in -0.9..0.9f64,
    ) {
        let u = GraphFunction::from_expr(&format!("{a}*x + {b}*sin(t) + 0.2*x*t"), GraphDomain::new(-1.0, 1.0, -1.0, 1.0).unwrap()).unwrap();
        let rep = zx_check(&u, (x, t), &g).unwrap();
        prop_assert!(rep.residual() <= 1e-10);
        let gp = GraphPoint::at(&u, &g, (x, t)).unwrap();
        prop_assert!((gp.metric.norm(gp.z()) - 1.0).abs() <= 1e-12);
        prop_assert!((gp.metric.norm(gp.nu_h()) - 1.0).abs() <= 1e-12);
        prop_assert!(gp.metric.inner(gp.z(), gp.nu_h()).abs() <= 1e-12);
        let (n_h, d_sigma) = gp.normal_split().unwrap();
        prop_assert!((n_h * d_sigma - gp.area_element).abs() <= 1e-10);
    }

    #[test]
    fn reeb_field_is_parallel(
        g in heis_like_metric(),
        x in -1.0..1.0f64,
        y in -1.0..1.0f64,
        t in -1.0..1.0f64,
        va in -1.0..1.0f64,
        vb in -1.0..1.0f64,
    ) {
        let v = HorizontalVec::new(ChartPoint::new(x, y, t), va, vb);
        let r = nabla_reeb(&g, &v, DEFAULT_FD_STEP).unwrap();
        prop_assert!(r.iter().all(|c| c.abs() <= 1e-6), "{r:?}");
    }

    #[test]
    fn heisenberg_connection_is_flat(
        x in -3.0..3.0f64,
        y in -3.0..3.0f64,
        t in -3.0..3.0f64,
        va in -1.0..1.0f64,
        vb in -1.0..1.0f64,
    ) {
        let h = MetricField::heisenberg();
        let p = ChartPoint::new(x, y, t);
        prop_assert!(nabla_frame(&h, &p).unwrap().max_abs() <= 1e-12);
        let tau = tau_apply(&h, &HorizontalVec::new(p, va, vb), DEFAULT_FD_STEP).unwrap();
        prop_assert!(tau.a.abs() <= 1e-6 && tau.b.abs() <= 1e-6);
        prop_assert!(levi_civita_coord(&h, &p, DEFAULT_FD_STEP).is_ok());
    }

    #[test]
    fn flat_geodesics_keep_their_angle(
        theta in -3.0..3.0f64,
        x in -1.0..1.0f64,
        y in -1.0..1.0f64,
    ) {
        let c = integrate_geodesic(&MetricField::heisenberg(), ChartPoint::new(x, y, 0.0), theta, &CurvatureProfile::Constant(0.0), 2.0, 1e-2).unwrap();
        prop_assert!(c.theta.iter().all(|th| (th - theta).abs() <= 1e-10));
    }

    #[test]
    fn lipschitz_families_never_cross(
        vals in proptest::collection::vec(-1.0..1.0f64, 36),
        b in 0.2..0.6f64,
    ) {
        let grid = GridData::new(GraphDomain::unit(), 6, 6, vals).unwrap();
        let u = GraphFunction::from_grid(grid);
        let eps = [0.0, 1e-3, 2e-3];
        let fam = foliate_family(&u, 0.5, b, &eps, (0.0, 1.0), 1e-3).unwrap();
        prop_assert!(fam.min_gap() > 0.0);
        prop_assert!(fam.min_dt_deps() > 0.0);
    }
}
