use std::sync::Arc;

use num_traits::One;
use proptest::prelude::*;

use super::*;
use crate::ncpoly::{Element, Gen, Word};
use crate::report::Status;
use crate::testutil::*;
use crate::Scalar;

#[test]
fn group_like_coproducts() {
    let h = u1_hopf();
    let p = h.algebra().clone();
    let a = w(&p, "a");
    assert_eq!(h.coproduct(&a), TensorElement::pure(&[&a, &a]));
    assert_eq!(h.iterated(&a, 2), TensorElement::pure(&[&a, &a, &a]));
    assert_eq!(h.iterated(&a, 0), TensorElement::pure(&[&a]));
    assert_eq!(h.antipode(&a), w(&p, "a*"));
    assert_eq!(h.counit(&a), Scalar::one());
}

#[test]
fn su2_structure_maps() {
    let h = su2_hopf();
    let p = h.algebra().clone();
    let alpha = w(&p, "alpha");
    let expect = &TensorElement::pure(&[&alpha, &alpha])
        - &TensorElement::pure(&[&w(&p, "gamma*"), &w(&p, "gamma")]).scale(&nu(1));
    assert_eq!(h.coproduct(&alpha), expect);
    assert_eq!(h.counit(&alpha), Scalar::one());
    assert_eq!(h.counit(&w(&p, "gamma")), int(0));
    assert_eq!(h.antipode(&w(&p, "gamma")), w(&p, "gamma").scale(&-nu(1)));
    assert_eq!(h.antipode_inv(&w(&p, "gamma")).unwrap(), w(&p, "gamma").scale(&-nu(-1)));
}

#[test]
fn hopf_axioms_hold_for_standard_algebras() {
    for h in [su2_hopf(), u1_hopf()] {
        let r = check_hopf_axioms(&h, 3);
        assert!(r.passed(), "{:#?}", r.failures().collect::<Vec<_>>());
        assert!(r.records.iter().all(|c| c.status == Status::Pass));
    }
}

#[test]
fn wrong_antipode_sign_fails_on_gamma() {
    let h = su2_hopf_with(nu(1));
    let r = check_hopf_axioms(&h, 3);
    let rec = r.find("SUnu2: antipode axiom").unwrap();
    assert_eq!(rec.status, Status::Fail);
    let failing = rec.detail.rsplit(": ").next().unwrap();
    assert!(failing.split(", ").any(|g| g == "gamma"), "{}", rec.detail);
    assert!(rec.witness.is_some());
}

#[test]
fn convolution_examples() {
    let h = su2_hopf();
    let p = h.algebra().clone();
    let id = LinMap::identity(&h);
    let unit = LinMap::counit(&h, &p);
    let s = id.precompose(Antipode::S).unwrap();

    let ef = LinMap::convolve(&unit, &id).unwrap();
    for word in h.basis(2) {
        assert_eq!(ef.eval_word(&word), id.eval_word(&word));
    }
    let ids = LinMap::convolve(&id, &s).unwrap();
    for g in ["alpha", "alpha*", "gamma", "gamma*"] {
        let e = w(&p, g);
        assert_eq!(ids.eval(&e), Element::scalar(&p, h.counit(&e)));
    }

    // sum alpha_1 alpha_2 = alpha alpha - nu gamma* gamma
    let sq = LinMap::convolve(&id, &id).unwrap();
    let expect = &w(&p, "alpha alpha") - &w(&p, "gamma* gamma").scale(&nu(1));
    assert_eq!(sq.eval(&w(&p, "alpha")), expect);
    assert_eq!(LinMap::conv_power(&id, 2, false).unwrap().eval(&w(&p, "alpha")), expect);
    assert!(LinMap::conv_power(&id, 1, false).unwrap().ptr_eq(&id));
    assert!(LinMap::conv_power(&id, 0, false).is_err());

    // sum S(alpha_1) S(alpha_2) = alpha* alpha* - nu gamma* gamma
    let inv = LinMap::conv_power(&id, 2, true).unwrap();
    let expect = &w(&p, "alpha* alpha*") - &w(&p, "gamma* gamma").scale(&nu(1));
    assert_eq!(inv.eval(&w(&p, "alpha")), expect);
}

#[test]
fn convolution_inverse_checks() {
    let h = su2_hopf();
    let id = LinMap::identity(&h);
    for n in 1..=3 {
        let f = LinMap::conv_power(&id, n, false).unwrap();
        let g = LinMap::conv_power(&id, n, true).unwrap();
        assert!(conv_inverse_witness(&f, &g, 2, InverseSide::Both, false).unwrap().is_none());
        assert!(g.ptr_eq(&g) && f.default_inverse().is_some());
    }
    let bad = conv_inverse_witness(&id, &id, 2, InverseSide::Both, false).unwrap().unwrap();
    assert_eq!(bad.subject, "f*g on alpha");
    let rec = check_conv_inverse(&id, &id, 2, InverseSide::Left, false);
    assert_eq!(rec.status, Status::Fail);
}

#[test]
fn hom_and_table_maps() {
    let h = su2_hopf();
    let b = b1();
    let m = crate::ncpoly::Morphism::new(
        "tau",
        h.algebra(),
        &b,
        vec![
            ("alpha", w(&b, "x")),
            ("alpha*", w(&b, "x*")),
            ("gamma", Element::zero(&b)),
            ("gamma*", Element::zero(&b)),
        ],
        false,
    )
    .unwrap()
    .certify()
    .unwrap();
    let tau = LinMap::hom(&h, &Arc::new(m)).unwrap();
    let tau_inv = tau.default_inverse().unwrap();
    assert_eq!(tau_inv.eval(&w(h.algebra(), "alpha")), w(&b, "x*"));
    assert!(conv_inverse_witness(&tau, &tau_inv, 2, InverseSide::Both, false).unwrap().is_none());
    assert_eq!(tau.to_string(), "hom(tau)");
    assert_eq!(tau_inv.to_string(), "compose_S(hom(tau))");

    let table = LinMap::table(&h, &b, vec![(Word::empty(), Element::one(&b)), (Word::letter(0), w(&b, "y"))]).unwrap();
    assert_eq!(table.eval(&w(h.algebra(), "alpha alpha")), Element::zero(&b));
    assert_eq!(table.to_string(), "table { 1: 1; alpha: y }");
}

fn arb_word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..4 as Gen, 0..=max).prop_map(Word::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coproduct_is_multiplicative_and_coassociative(u in arb_word(2), v in arb_word(2)) {
        let h = su2_hopf();
        let p = h.algebra().clone();
        let (a, b) = (Element::from_word(&p, &u, Scalar::one()), Element::from_word(&p, &v, Scalar::one()));
        prop_assert_eq!(h.coproduct(&(&a * &b)), &h.coproduct(&a) * &h.coproduct(&b));
        let two = [p.clone(), p.clone()];
        let d = h.coproduct(&(&a * &b));
        let left = d.replace_slot(0, &two, |x| (*h.iterated_word(x, 1)).clone());
        let right = d.replace_slot(1, &two, |x| (*h.iterated_word(x, 1)).clone());
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(left, h.iterated(&(&a * &b), 2));
    }

    #[test]
    fn convolution_is_associative_and_unital(u in arb_word(2)) {
        let h = su2_hopf();
        let p = h.algebra().clone();
        let id = LinMap::identity(&h);
        let s = id.precompose(Antipode::S).unwrap();
        let sq = LinMap::convolve(&id, &id).unwrap();
        let unit = LinMap::counit(&h, &p);
        let l = LinMap::convolve(&LinMap::convolve(&sq, &s).unwrap(), &id).unwrap();
        let r = LinMap::convolve(&sq, &LinMap::convolve(&s, &id).unwrap()).unwrap();
        prop_assert_eq!(l.eval_word(&p.nf(&u)[0].0.clone()), r.eval_word(&p.nf(&u)[0].0.clone()));
        let x = Element::from_word(&p, &u, Scalar::one());
        prop_assert_eq!(LinMap::convolve(&id, &unit).unwrap().eval(&x), x.clone());
        let sinv = id.precompose(Antipode::SInv).unwrap();
        prop_assert_eq!(sinv.eval(&s.eval(&x)), x);
    }
}
