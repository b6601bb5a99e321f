use super::*;
use crate::hopf::Antipode;
use crate::report::Status;
use crate::testutil::{b1, example_bundle, example_family, int, morphism, u1, u1_hopf, w};
use crate::Scalar;

fn assert_passed(report: &Report) {
    let failures: Vec<_> = report.failures().collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

fn dw(p: &Arc<Presentation<Scalar>>, a: &str) -> Form<Scalar> {
    Form::exact(&w(p, a))
}

#[test]
fn differential_basics() {
    let b = b1();
    assert!(dw(&b, "1").is_zero());
    assert_eq!(dw(&b, "x").to_string(), "d(x)");
    assert!(dw(&b, "x").d().is_zero());
    assert_eq!(dw(&b, "x").degree(), 1);
    let f = Form::function(&w(&b, "x")).right_mul(&Element::one(&b)).unwrap();
    assert_eq!(f, Form::function(&w(&b, "x")));
}

#[test]
fn leibniz_against_relations() {
    let b = b1();
    // (dx) x* = d(x x*) - x dx* = -x dx*
    let lhs = dw(&b, "x").right_mul(&w(&b, "x*")).unwrap();
    let rhs = -&dw(&b, "x*").left_mul(&w(&b, "x")).unwrap();
    assert_eq!(lhs, rhs);
    // (dy) x = (1/q) d(x y) - y dx
    let yx = dw(&b, "y").right_mul(&w(&b, "x")).unwrap();
    assert_eq!(yx.to_string(), "q^-1 d(x y) - y d(x)");
}

#[test]
fn product_of_differentials() {
    let b = b1();
    let f = &dw(&b, "x") * &dw(&b, "y");
    assert_eq!(f.degree(), 2);
    let x = b.parse_word("x").unwrap();
    let y = b.parse_word("y").unwrap();
    assert_eq!(f.terms().get(&vec![Word::empty(), x, y]), Some(&int(1)));
    assert_eq!(f.to_string(), "d(x) d(y)");
}

fn example_connection(bundle: &Arc<crate::bundle::Bundle<Scalar>>) -> ConnectionForm<Scalar> {
    let b = &bundle.charts()[0].algebra;
    let a = dw(b, "x").left_mul(&w(b, "x*")).unwrap();
    ConnectionForm::table("A", Side::Left, bundle.fibre(), b, vec![(Word::letter(0), a)]).unwrap()
}

#[test]
fn covariant_derivative_examples() {
    let bundle = example_bundle();
    let a = example_connection(&bundle);
    let b = &bundle.charts()[0].algebra;
    let h = bundle.fibre().algebra();
    let t = |x: &str, y: &str| TensorElement::pure(&[&w(b, x), &w(h, y)]);
    assert!(local_covariant_derivative(&a, &t("1", "1")).is_zero());
    let dy = local_covariant_derivative(&a, &t("y", "1"));
    assert_eq!(dy.terms().len(), 1);
    assert_eq!(dy.terms()[&Word::empty()], dw(b, "y"));
    // with A(gamma*) = 0 only -A(alpha) (x) alpha survives
    let d_alpha = local_covariant_derivative(&a, &t("1", "alpha"));
    assert_eq!(d_alpha.terms().len(), 1);
    assert_eq!(d_alpha.terms()[&Word::letter(0)], -&a.eval_word(&Word::letter(0)));
}

#[test]
fn identity_gauge_is_bit_exact() {
    let bundle = example_bundle();
    let a = example_connection(&bundle);
    let id = LocalGauge::identity(bundle.fibre(), a.algebra(), Side::Left);
    let a2 = gauge_transform_connection(&a, &id).unwrap();
    for word in bundle.fibre().basis(2) {
        let (x, y) = (a.eval_word(&word), a2.eval_word(&word));
        assert_eq!(x.terms(), y.terms());
    }
}

fn u1_gauge() -> (Arc<HopfAlgebra<Scalar>>, Arc<Presentation<Scalar>>, LocalGauge<Scalar>) {
    let h = u1_hopf();
    let c = u1("C", "u");
    let m = morphism("tau", h.algebra(), &c, vec![("a", w(&c, "u")), ("a*", w(&c, "u*"))]);
    let tau = LinMap::hom(&h, &Arc::new(m)).unwrap();
    let gauge = LocalGauge::new(Side::Left, tau.clone(), tau.precompose(Antipode::S).unwrap()).unwrap();
    (h, c, gauge)
}

#[test]
fn group_like_transformation() {
    let (h, c, gauge) = u1_gauge();
    let a_val = dw(&c, "u").left_mul(&w(&c, "u*")).unwrap().scale(&int(3));
    let a = ConnectionForm::table("A", Side::Left, &h, &c, vec![(Word::letter(0), a_val.clone())]).unwrap();
    let a2 = gauge_transform_connection(&a, &gauge).unwrap();
    let u = w(&c, "u");
    let us = w(&c, "u*");
    let expect = &a_val.left_mul(&us).unwrap().right_mul(&u).unwrap() + &dw(&c, "u").left_mul(&us).unwrap();
    assert_eq!(a2.eval_word(&Word::letter(0)), expect);
    // pure gauge from the zero connection is flat on group-likes
    let zero = ConnectionForm::zero("0", Side::Left, &h, &c);
    let pure = gauge_transform_connection(&zero, &gauge).unwrap();
    assert_eq!(pure.eval_word(&Word::letter(0)), dw(&c, "u").left_mul(&us).unwrap());
    let f = curvature(&pure);
    assert!(f.eval_word(&Word::letter(0)).is_zero());
    assert!(f.eval_word(&Word::empty()).is_zero());
}

#[test]
fn example_curvature_covariance() {
    let bundle = example_bundle();
    let a = example_connection(&bundle);
    let gauge = LocalGauge::from_family(&example_family(&bundle, 1), 0);
    let report = check_curvature_covariance(&a, &gauge, 2);
    assert_passed(&report);
    assert!(report.find("A: D' alpha = alpha D").is_some());
    let a2 = gauge_transform_connection(&a, &gauge).unwrap();
    assert!(!a2.eval_word(&Word::letter(0)).is_zero());
}

#[test]
fn right_curvature_covariance() {
    let bundle = example_bundle();
    let fam = example_family(&bundle, 1);
    let tau = fam.tau(0).precompose(Antipode::SInv).unwrap();
    let gauge = LocalGauge::new(Side::Right, tau, fam.tau(0).clone()).unwrap();
    let b = &bundle.charts()[0].algebra;
    let val = dw(b, "x").left_mul(&w(b, "x*")).unwrap();
    let a = ConnectionForm::table("A", Side::Right, bundle.fibre(), b, vec![(Word::letter(0), val)]).unwrap();
    assert_passed(&check_curvature_covariance(&a, &gauge, 2));
}

#[test]
fn transforms_compose() {
    let bundle = example_bundle();
    let a = example_connection(&bundle);
    let g1 = LocalGauge::from_family(&example_family(&bundle, 1), 0);
    let g2 = LocalGauge::from_family(&example_family(&bundle, 2), 0);
    assert_passed(&check_connection_cocycle(&a, &g1, &g2, 2));
}

fn r_gen(h: &Arc<HopfAlgebra<Scalar>>) -> Element<Scalar> {
    let p = h.algebra();
    let a = &w(p, "a") - &Element::one(p);
    &a * &a
}

#[test]
fn central_u1_ideal_passes() {
    let (h, c, gauge) = u1_gauge();
    let calc = FirstOrderCalculus::derivation(&c, vec![("u", w(&c, "u")), ("u*", -&w(&c, "u*"))]).unwrap();
    let du = dw(&c, "u").left_mul(&w(&c, "u*")).unwrap();
    let aa = h.algebra().parse_word("a a").unwrap();
    let conn = ConnectionForm::table(
        "A",
        Side::Left,
        &h,
        &c,
        vec![(Word::letter(0), du.clone()), (aa, du.scale(&int(2)))],
    )
    .unwrap();
    let report = check_ideal_conditions(&calc, &gauge, &[r_gen(&h)], Some(&conn), 2);
    assert_passed(&report);
    assert!(report.records.len() >= 5);
    let empty = check_ideal_conditions(&calc, &gauge, &[], None, 2);
    assert!(empty.records.iter().all(|r| r.status == Status::Vacuous));
}

#[test]
fn derivation_must_respect_relations() {
    let b = b1();
    assert!(FirstOrderCalculus::derivation(&b, vec![("x", w(&b, "x")), ("x*", w(&b, "x*"))]).is_err());
    assert!(FirstOrderCalculus::derivation(&b, vec![("x", w(&b, "x")), ("x*", -&w(&b, "x*"))]).is_ok());
}

#[test]
fn noncentral_tau_is_reported() {
    let h = u1_hopf();
    let b = b1();
    let m = morphism("tau", h.algebra(), &b, vec![("a", w(&b, "x")), ("a*", w(&b, "x*"))]);
    let tau = LinMap::hom(&h, &Arc::new(m)).unwrap();
    let gauge = LocalGauge::new(Side::Left, tau.clone(), tau.precompose(Antipode::S).unwrap()).unwrap();
    let calc = FirstOrderCalculus::Universal(b.clone());
    let report = check_ideal_conditions(&calc, &gauge, &[r_gen(&h)], None, 1);
    let rec = report.find("d(y) commutes with tau").unwrap();
    assert_eq!(rec.status, Status::Fail);
    let wit = rec.witness.as_ref().unwrap();
    assert_eq!(wit.subject, "d(y) tau(a)");
    assert_eq!(wit.lhs, "q^-1 d(x y) - y d(x)");
    assert_eq!(wit.rhs, "x d(y)");
}
