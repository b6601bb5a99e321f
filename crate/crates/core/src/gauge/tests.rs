use super::*;
use crate::report::Status;
use crate::testutil::{example_bundle, example_family, nu, q, w};
use crate::Scalar;

fn g(n: u32) -> GaugeTransformation<Scalar> {
    g_on(&example_bundle(), n)
}

fn g_on(bundle: &Arc<Bundle<Scalar>>, n: u32) -> GaugeTransformation<Scalar> {
    build_gauge_from_family(example_family(bundle, n), 2).unwrap()
}

fn local(bundle: &Bundle<Scalar>, i: usize, a: &str, h: &str) -> TensorElement<Scalar> {
    let slots = bundle.local_slots(i);
    TensorElement::pure(&[&w(&slots[0], a), &w(&slots[1], h)])
}

fn assert_passed(report: &Report) {
    let failures: Vec<_> = report.failures().collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn compatibility_holds_in_both_orders() {
    let bundle = example_bundle();
    for n in 1..=3 {
        let fam = example_family(&bundle, n);
        for order in [CompatibilityOrder::ChartChange, CompatibilityOrder::Printed] {
            assert!(fam.compatibility_witness(2, order).unwrap().is_none(), "n = {n}");
        }
        let alpha = Word::letter(0);
        let (lhs, rhs) = fam.compatibility_sides(0, 1, &alpha, CompatibilityOrder::Printed).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, w(&bundle.overlap(0, 1).unwrap().algebra, "a").pow(n));
    }
}

#[test]
fn perturbed_family_is_rejected_on_alpha() {
    let bundle = example_bundle();
    let h = bundle.fibre();
    let b = &bundle.charts()[0].algebra;
    let table = LinMap::table(
        h,
        b,
        vec![
            (Word::empty(), Element::one(b)),
            (Word::letter(0), w(b, "y")),
            (Word::letter(1), w(b, "x*")),
        ],
    )
    .unwrap();
    let tau2 = LinMap::identity(h);
    let inv1 = LinMap::table(h, b, vec![(Word::empty(), Element::one(b))]).unwrap();
    let fam = GaugeFamily::new("bad", &bundle, Side::Left, vec![table, tau2], vec![Some(inv1), None]).unwrap();
    match build_gauge_from_family(fam.clone(), 2).unwrap_err() {
        Error::Compatibility { monomial, overlap, .. } => {
            assert_eq!(monomial, "alpha");
            assert_eq!(overlap, "12");
        }
        e => panic!("unexpected {e}"),
    }
    let (report, built) = check_family(&fam, 2);
    assert!(built.is_none());
    assert_eq!(report.find("bad: chart maps glue").unwrap().status, Status::Fail);
}

#[test]
fn g1_passes_all_checks() {
    let t = g(1);
    assert_eq!(t.g_word(&Word::empty(), false), t.bundle().total_one());
    let report = verify_gauge(&t, 2);
    assert_passed(&report);
    assert!(report.records.len() >= 10);
}

#[test]
fn g2_passes_all_checks() {
    assert_passed(&verify_gauge(&g(2), 2));
}

#[test]
fn unit_violation_is_reported() {
    let bundle = example_bundle();
    let h = bundle.fibre();
    let b = &bundle.charts()[0].algebra;
    let one_plus_y = &Element::one(b) + &w(b, "y");
    let table = LinMap::table(
        h,
        b,
        vec![(Word::empty(), one_plus_y), (Word::letter(0), w(b, "x")), (Word::letter(1), w(b, "x*"))],
    )
    .unwrap();
    let inv = LinMap::table(
        h,
        b,
        vec![(Word::empty(), Element::one(b)), (Word::letter(0), w(b, "x*")), (Word::letter(1), w(b, "x"))],
    )
    .unwrap();
    let fam = GaugeFamily::new("shifted", &bundle, Side::Left, vec![table, LinMap::identity(h)], vec![Some(inv), None])
        .unwrap();
    let t = build_gauge_from_family(fam, 1).unwrap();
    let report = verify_gauge(&t, 1);
    assert_eq!(report.find("shifted: g(1) = 1").unwrap().status, Status::Fail);
}

#[test]
fn chart_action_matches_local_formula() {
    let t = g(1);
    let bundle = t.bundle().clone();
    let f = bundle.glue(vec![local(&bundle, 0, "1", "alpha"), local(&bundle, 1, "alpha*", "alpha")]).unwrap();
    let a = t.apply(&f);
    assert_eq!(a.locals[0], local(&bundle, 0, "x", "alpha"));
    let b1 = &bundle.charts()[0].algebra;
    let c = bundle.base_element(vec![w(b1, "y"), Element::zero(&bundle.charts()[1].algebra)]).unwrap();
    assert_eq!(t.apply(&bundle.embed(&c)), bundle.embed(&c));
}

#[test]
fn group_laws() {
    let bundle = example_bundle();
    let (g1, g2) = (g_on(&bundle, 1), g_on(&bundle, 2));
    let id = GaugeTransformation::identity(g1.bundle(), Side::Left);
    assert!(identity_witness(&g1.compose(&g1.invert()).unwrap(), 2).unwrap().is_none());
    assert!(identity_witness(&g1.invert().compose(&g1).unwrap(), 2).unwrap().is_none());
    assert!(agreement_witness(&g1.compose(&g1).unwrap(), &g2, 2).unwrap().is_none());
    assert!(agreement_witness(&g1.compose(&id).unwrap(), &g1, 2).unwrap().is_none());
    assert!(identity_witness(&id.invert(), 2).unwrap().is_none());
    assert_passed(&verify_gauge(&g1.compose(&g1).unwrap(), 2));
    let alpha = Word::letter(0);
    let b1 = &g1.bundle().charts()[0].algebra;
    assert_eq!(g1.invert().family().tau(0).eval_word(&alpha), w(b1, "x*"));
    assert!(agreement_witness(&g1.invert().invert(), &g1, 1).unwrap().is_none());
    assert!(agreement_witness(&g1, &g2, 1).unwrap().is_some());
}

#[test]
fn side_mismatch_is_an_error() {
    let g1 = g(1);
    let r = g1.left_to_right().unwrap();
    assert!(matches!(g1.compose(&r), Err(Error::SideMismatch)));
    assert!(matches!(r.left_to_right(), Err(Error::SideMismatch)));
}

#[test]
fn left_to_right_conversion() {
    let g1 = g(1);
    let report = check_left_right(&g1, 2);
    assert_passed(&report);
    let id = GaugeTransformation::identity(g1.bundle(), Side::Left).left_to_right().unwrap();
    assert!(identity_witness(&id, 2).unwrap().is_none());
}

#[test]
fn non_automorphism_differs_by_q() {
    let t = g(1);
    let found = find_non_automorphism_witness(&t, 2).unwrap().expect("witness");
    assert_eq!(found.ratio(), Some(q(1)));
    let bundle = t.bundle();
    let b1 = &bundle.charts()[0].algebra;
    let f = bundle.glue(vec![local(bundle, 0, "1", "alpha"), local(bundle, 1, "alpha*", "alpha")]).unwrap();
    let y = bundle.base_element(vec![w(b1, "y"), Element::zero(&bundle.charts()[1].algebra)]).unwrap();
    let pair = non_automorphism_on(&t, &f, &bundle.embed(&y)).expect("not multiplicative");
    assert_eq!(pair.ratio(), Some(q(1)));
    let id = GaugeTransformation::identity(bundle, Side::Left);
    assert!(find_non_automorphism_witness(&id, 2).unwrap().is_none());
}

fn fundamental(bundle: &Bundle<Scalar>) -> Corep<Scalar> {
    let h = bundle.fibre();
    let p = h.algebra();
    let entries = vec![
        vec![w(p, "alpha"), w(p, "gamma*").scale(&-nu(1))],
        vec![w(p, "gamma"), w(p, "alpha*")],
    ];
    Corep::new("u", h, entries).unwrap()
}

#[test]
fn fundamental_corep_matrices() {
    let t = g(1);
    let u = fundamental(t.bundle());
    assert!(u.witness().is_none());
    let (m, report) = corep_matrix_check(&t, &u, 2).unwrap();
    assert_passed(&report);
    let b1 = &t.bundle().charts()[0].algebra;
    assert_eq!(m.per_chart[0][0][0], w(b1, "x"));
    assert!(m.per_chart[0][0][1].is_zero());
    assert_eq!(m.per_chart[0][1][1], w(b1, "x*"));
    assert_eq!(m.inverses[0][0][0], w(b1, "x*"));
}

#[test]
fn trivial_corep() {
    let t = g(1);
    let h = t.fibre();
    let u = Corep::new("1", h, vec![vec![Element::one(h.algebra())]]).unwrap();
    let (m, report) = corep_matrix_check(&t, &u, 2).unwrap();
    assert_passed(&report);
    assert_eq!(m.per_chart[0][0][0], Element::one(&t.bundle().charts()[0].algebra));
}

#[test]
fn non_invertible_corep_matrix() {
    let bundle = example_bundle();
    let h = bundle.fibre();
    let b = &bundle.charts()[0].algebra;
    let table = LinMap::table(
        h,
        b,
        vec![(Word::empty(), Element::one(b)), (Word::letter(0), w(b, "y")), (Word::letter(1), w(b, "x*"))],
    )
    .unwrap();
    let inv = LinMap::table(h, b, vec![(Word::empty(), Element::one(b))]).unwrap();
    let fam =
        GaugeFamily::new("bad", &bundle, Side::Left, vec![table, LinMap::identity(h)], vec![Some(inv), None]).unwrap();
    let t = GaugeTransformation::from_family_unchecked(fam);
    let u = fundamental(&bundle);
    match corep_matrix_check(&t, &u, 2) {
        Err(Error::NotInvertible { degree, row }) => {
            assert_eq!(degree, 2);
            assert_eq!(row, 1);
        }
        other => panic!("unexpected {:?}", other.map(|_| ())),
    }
}
