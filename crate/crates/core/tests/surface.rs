use grafting_core::surface::{
    canonical_key, check_spiraling_hypotheses, graft_along, graft_disjoint, graft_spiraling, is_admissible,
    twist_about_curve, validate_configuration, Admissibility, CanonicalMulticurve, Configuration, Curve, HolonomyTag,
    MeridianTwist, Multicurve, SpiralClass, Structure, SurfaceError, SurfaceModel,
};
use grafting_core::torus::TorusClass;

fn gamma(q1: i64, q2: i64) -> Curve {
    Curve::new("gamma").in_chart("b1", (1, q1)).in_chart("b2", (1, q2))
}

#[test]
fn holonomy_is_preserved_everywhere() {
    let cfg = validate_configuration(&Configuration::standard(&["b1", "b2"])).unwrap();
    let m = cfg.model();
    let seed = cfg.seed();
    let grafted = graft_along(m, &seed, &gamma(2, 0)).unwrap();
    let twisted = seed.twist_about_meridian(m, "b2", 3).unwrap();
    for s in [&grafted, &twisted] {
        assert_eq!(s.holonomy, HolonomyTag::new("schottky"));
    }
}

#[test]
fn directions_are_per_chart() {
    let cfg = validate_configuration(&Configuration::standard(&["b1", "b2"])).unwrap();
    let m = cfg.model();
    match is_admissible(m, &gamma(2, -1), &cfg.seed()) {
        Admissibility::Spiraling(d) => {
            assert_eq!(d["b1"], SpiralClass::Left(2));
            assert_eq!(d["b2"], SpiralClass::Right(1));
        }
        other => panic!("{other:?}"),
    }
    let out = graft_spiraling(m, &cfg.seed(), &gamma(2, -1)).unwrap();
    assert_eq!(out.real_curves.chart("b1"), TorusClass::new(4, 4));
    assert_eq!(out.real_curves.chart("b2"), TorusClass::new(4, -2));
}

#[test]
fn spiraling_check_uses_twist_counts() {
    let cfg = validate_configuration(&Configuration::standard(&["b1", "b2"])).unwrap();
    let base = gamma(0, 0);
    let check = check_spiraling_hypotheses(cfg.model(), &gamma(3, 0), &base, cfg.lambda());
    assert!(check.is_spiraling());
    assert_eq!(check.directions["b2"], SpiralClass::NonSpiraling);
    let other_label = Curve::new("eta").in_chart("b1", (1, 3)).in_chart("b2", (1, 0));
    assert!(!check_spiraling_hypotheses(cfg.model(), &other_label, &base, cfg.lambda()).holds);
}

#[test]
fn meridian_twists_compose() {
    let cfg = validate_configuration(&Configuration::standard(&["b1"])).unwrap();
    let m = cfg.model();
    let c = Curve::new("gamma").in_chart("b1", (1, 0));
    let once = c
        .twist_about_meridian(m, "b1", 2)
        .unwrap()
        .twist_about_meridian(m, "b1", -5)
        .unwrap();
    assert_eq!(once, c.twist_about_meridian(m, "b1", -3).unwrap());
}

#[test]
fn chart_free_curves_graft_disjointly() {
    let model = SurfaceModel::new(2, HolonomyTag::new("rho"), ["b"]).unwrap();
    let s = Structure::standard(HolonomyTag::new("rho"));
    let once = graft_disjoint(&model, &s, &Curve::new("alpha")).unwrap();
    let twice = graft_disjoint(&model, &once, &Curve::new("alpha")).unwrap();
    assert_eq!(twice.key(), "4*(alpha)");
}

#[test]
fn exterior_crossings_reject_grafts() {
    let model = SurfaceModel::new(2, HolonomyTag::new("rho"), ["b"])
        .unwrap()
        .with_exterior_crossing("alpha", "delta");
    let s = Structure::new(
        HolonomyTag::new("rho"),
        Multicurve::new(vec![Curve::new("alpha").times(2)]).canonical().unwrap(),
    );
    assert!(matches!(
        graft_disjoint(&model, &s, &Curve::new("delta")),
        Err(SurfaceError::NotAdmissible(_))
    ));
}

#[test]
fn twist_about_curve_counts_labels() {
    let lambda = Multicurve::new(vec![Curve::new("lambda").in_chart("b", (2, 0))])
        .canonical()
        .unwrap();
    let g = Curve::new("gamma").in_chart("b", (1, 1));
    let t2 = twist_about_curve(&lambda, &g, 2).unwrap();
    assert_eq!(t2.chart("b"), TorusClass::new(6, 4));
    assert_eq!(t2.blocks()[0].labels["gamma"], 4);
    assert_eq!(twist_about_curve(&lambda, &g, 0).unwrap(), lambda);
}

#[test]
fn canonical_form_is_order_independent() {
    let parts = vec![
        Curve::new("lambda").in_chart("b", (1, 0)),
        Curve::new("alpha").times(2),
        Curve::new("lambda").in_chart("b", (-1, 0)),
        Curve::new("nu").in_chart("c", (0, 3)),
    ];
    let mut reversed = parts.clone();
    reversed.reverse();
    assert_eq!(
        canonical_key(&Multicurve::new(parts)).unwrap(),
        canonical_key(&Multicurve::new(reversed)).unwrap()
    );
    assert_eq!(CanonicalMulticurve::empty().key(), "empty");
}
