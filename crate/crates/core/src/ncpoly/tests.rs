use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

use super::*;
use crate::Scalar;

fn q(e: i32) -> Scalar {
    Scalar::param("q", e)
}

fn nu(e: i32) -> Scalar {
    Scalar::param("nu", e)
}

fn b1() -> Arc<Presentation<Scalar>> {
    PresentationBuilder::new("B1", &["x", "x*", "y"])
        .params(&["q"])
        .star("x", "x*")
        .star("y", "y")
        .rule("y x", vec![(q(-1), "x y")])
        .rule("y x*", vec![(q(1), "x* y")])
        .rule("x x*", vec![(Scalar::one(), "1")])
        .rule("x* x", vec![(Scalar::one(), "1")])
        .build()
        .unwrap()
}

fn su2() -> Arc<Presentation<Scalar>> {
    let one = Scalar::one;
    PresentationBuilder::new("SUnu2", &["alpha", "alpha*", "gamma", "gamma*"])
        .params(&["nu"])
        .star("alpha", "alpha*")
        .star("gamma", "gamma*")
        .rule("alpha* alpha", vec![(nu(-2), "alpha alpha*"), (one() - nu(-2), "1")])
        .rule("gamma gamma*", vec![(nu(-2), "1"), (-nu(-2), "alpha alpha*")])
        .rule("gamma* gamma", vec![(nu(-2), "1"), (-nu(-2), "alpha alpha*")])
        .rule("gamma alpha", vec![(nu(-1), "alpha gamma")])
        .rule("gamma* alpha", vec![(nu(-1), "alpha gamma*")])
        .rule("gamma alpha*", vec![(nu(1), "alpha* gamma")])
        .rule("gamma* alpha*", vec![(nu(1), "alpha* gamma*")])
        .build()
        .unwrap()
}

fn u1() -> Arc<Presentation<Scalar>> {
    PresentationBuilder::new("U1", &["a", "a*"])
        .star("a", "a*")
        .rule("a a*", vec![(Scalar::one(), "1")])
        .rule("a* a", vec![(Scalar::one(), "1")])
        .build()
        .unwrap()
}

fn w(p: &Arc<Presentation<Scalar>>, text: &str) -> Element<Scalar> {
    Element::word(p, text).unwrap()
}

#[test]
fn tube_relations_normalize() {
    let p = b1();
    assert_eq!(w(&p, "y x"), w(&p, "x y").scale(&q(-1)));
    assert_eq!(w(&p, "x x*"), Element::one(&p));
    assert_eq!(w(&p, "x* x"), Element::one(&p));
    assert_eq!(&w(&p, "y") * &w(&p, "x"), w(&p, "x y").scale(&q(-1)));
    assert_eq!(&w(&p, "x") * &w(&p, "y"), w(&p, "x y"));
    // x* y = q^-1 y x*
    assert_eq!(w(&p, "x* y"), w(&p, "y x*").scale(&q(-1)));
}

#[test]
fn star_of_tube_product() {
    let p = b1();
    let xy = w(&p, "x y");
    assert_eq!(w(&p, "x").star().unwrap(), w(&p, "x*"));
    assert_eq!(xy.star().unwrap(), w(&p, "x* y").scale(&q(1)));
    assert_eq!(Element::one(&p).star().unwrap(), Element::one(&p));
    assert_eq!(xy.star().unwrap().star().unwrap(), xy);
}

#[test]
fn tube_has_four_rules_and_self_adjoint_y() {
    let p = b1();
    assert_eq!(p.rules().len(), 4);
    let y = p.generator("y").unwrap();
    assert_eq!(p.star_of(y), Some(y));
}

#[test]
fn morphism_application_and_certificate() {
    let b = b1();
    let s1 = u1();
    let m = Morphism::new(
        "pi12",
        &b,
        &s1,
        vec![("x", w(&s1, "a")), ("x*", w(&s1, "a*")), ("y", Element::zero(&s1))],
        false,
    )
    .unwrap();
    assert!(m.apply(&w(&b, "x")).is_err());
    let m = m.certify().unwrap();
    assert!(m.star_violations().is_empty());
    assert_eq!(m.apply(&w(&b, "x")).unwrap(), w(&s1, "a"));
    assert_eq!(m.apply(&w(&b, "x x y")).unwrap(), Element::zero(&s1));
    let id = Morphism::identity(&b);
    let e = &w(&b, "x y") + &w(&b, "x*");
    assert_eq!(id.apply(&e).unwrap(), e);
}

#[test]
fn ill_defined_morphism_is_rejected() {
    let b = b1();
    let s1 = u1();
    // y x = q^-1 x y would force a = q^-1 a
    let m = Morphism::new(
        "bad",
        &b,
        &s1,
        vec![("x", w(&s1, "a")), ("x*", w(&s1, "a*")), ("y", w(&s1, "a"))],
        false,
    )
    .unwrap();
    assert!(matches!(m.certify(), Err(crate::Error::IllDefinedMorphism { .. })));
}

#[test]
fn standard_rule_sets_are_locally_confluent() {
    for p in [b1(), su2(), u1()] {
        let r = check_presentation(&p, 4);
        assert!(r.passed(), "{}: {:?} {:?}", p.name(), r.failures, r.star_failures);
        assert!(r.pairs_checked > 0);
    }
}

#[test]
fn conflicting_rules_are_not_joinable() {
    let p = PresentationBuilder::new("clash", &["y", "x"])
        .params(&["q"])
        .rule("x y", vec![(q(1), "y x")])
        .rule("x y", vec![(Scalar::one(), "y x")])
        .build()
        .unwrap();
    let r = check_presentation(&p, 2);
    assert!(!r.passed());
    assert_eq!(r.failures[0].word, "x y");
}

#[test]
fn rewrite_budget_names_the_word() {
    let p = PresentationBuilder::new("B1", &["x", "x*", "y"])
        .params(&["q"])
        .rule("y x", vec![(q(-1), "x y")])
        .budget(3)
        .build()
        .unwrap();
    let word = p.parse_word("y y y x x").unwrap();
    match p.normalize_word(&word) {
        Err(crate::Error::RewriteBudget { word, .. }) => assert_eq!(word, "y y y x x"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn non_decreasing_rule_is_rejected() {
    let r = PresentationBuilder::<Scalar>::new("bad", &["x", "y"])
        .rule("x y", vec![(Scalar::one(), "y x")])
        .build();
    assert!(r.is_err());
    assert!(PresentationBuilder::<Scalar>::new("empty", &[]).build().is_err());
}

#[test]
fn commutative_at_q_one() {
    let p = b1();
    let values: BTreeMap<String, BigRational> = [("q".to_string(), BigRational::one())].into();
    let special = p.map_coeffs(&|c: &Scalar| c.specialize(&values).unwrap()).unwrap();
    let words = special.normal_words(3);
    for u in &words {
        for v in &words {
            let a = Element::from_word(&special, u, Scalar::one());
            let b = Element::from_word(&special, v, Scalar::one());
            assert_eq!(&a * &b, &b * &a);
        }
    }
}

fn arb_word(n: usize, max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..n as Gen, 0..=max).prop_map(Word::new)
}

proptest! {
    #[test]
    fn normalize_is_idempotent(u in arb_word(4, 4)) {
        let p = su2();
        let e = Element::from_word(&p, &u, Scalar::one());
        for v in e.terms().keys() {
            prop_assert!(p.is_irreducible(v));
        }
        let raw: Vec<_> = e.terms().iter().map(|(v, c)| (v.clone(), c.clone())).collect();
        prop_assert_eq!(Element::normalize(&p, &raw).unwrap(), e);
    }

    #[test]
    fn multiplication_is_associative(a in arb_word(4, 3), b in arb_word(4, 3), c in arb_word(4, 3)) {
        let p = su2();
        let (a, b, c) = (
            Element::from_word(&p, &a, Scalar::one()),
            Element::from_word(&p, &b, Scalar::one()),
            Element::from_word(&p, &c, Scalar::one()),
        );
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &Element::one(&p), a.clone());
    }

    #[test]
    fn star_is_antimultiplicative_involution(a in arb_word(3, 4), b in arb_word(3, 4)) {
        let p = b1();
        let (a, b) = (Element::from_word(&p, &a, Scalar::one()), Element::from_word(&p, &b, Scalar::one()));
        prop_assert_eq!((&a * &b).star().unwrap(), &b.star().unwrap() * &a.star().unwrap());
        prop_assert_eq!(a.star().unwrap().star().unwrap(), a);
    }

    #[test]
    fn morphisms_are_multiplicative(a in arb_word(4, 4), b in arb_word(4, 4)) {
        let p = su2();
        let s1 = u1();
        let pi = Morphism::new(
            "pi21",
            &p,
            &s1,
            vec![
                ("alpha", w(&s1, "a")),
                ("alpha*", w(&s1, "a*")),
                ("gamma", Element::zero(&s1)),
                ("gamma*", Element::zero(&s1)),
            ],
            false,
        )
        .unwrap()
        .certify()
        .unwrap();
        let (a, b) = (Element::from_word(&p, &a, Scalar::one()), Element::from_word(&p, &b, Scalar::one()));
        prop_assert_eq!(pi.apply(&(&a * &b)).unwrap(), &pi.apply(&a).unwrap() * &pi.apply(&b).unwrap());
    }
}
