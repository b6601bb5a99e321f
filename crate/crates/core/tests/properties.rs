use std::sync::Arc;

use num_rational::BigRational;
use proptest::prelude::*;
use qpfb_core::calculus::Form;
use qpfb_core::corpus;
use qpfb_core::format::{Document, Specialization};
use qpfb_core::ncpoly::{Element, Presentation, Word};
use qpfb_core::suite::{run_suite, Suite, SuiteConfig};
use qpfb_core::Scalar;

fn b1() -> Arc<Presentation<Scalar>> {
    corpus::load(&Specialization::new()).unwrap().algebras["B1"].clone()
}

fn pair() -> impl Strategy<Value = (Element<Scalar>, Element<Scalar>)> {
    let p = b1();
    (element(p.clone()), element(p))
}

/// Random element of `p`: up to four words of at most three letters with
/// small integer coefficients, optionally times `q`.
fn element(p: Arc<Presentation<Scalar>>) -> impl Strategy<Value = Element<Scalar>> {
    let n = p.generators().len() as u16;
    let term = (prop::collection::vec(0..n, 0..=3), -3i64..=3, any::<bool>());
    prop::collection::vec(term, 0..=4).prop_map(move |terms| {
        let raw: Vec<(Word, Scalar)> = terms
            .into_iter()
            .map(|(letters, c, with_q)| {
                let c = Scalar::constant(BigRational::from_integer(c.into()));
                let c = if with_q { c * Scalar::param("q", 1) } else { c };
                (Word::new(letters), c)
            })
            .collect();
        Element::normalize(&p, &raw).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_squares_to_zero(a in element(b1())) {
        prop_assert!(Form::exact(&a).d().is_zero());
        let f = Form::exact(&a).left_mul(&a).unwrap();
        prop_assert!(f.d().d().is_zero());
    }

    #[test]
    fn leibniz_rule((a, b) in pair()) {
        let lhs = Form::exact(&a.try_mul(&b).unwrap());
        let rhs = Form::exact(&a).right_mul(&b).unwrap().try_add(&Form::exact(&b).left_mul(&a).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn d_is_linear((a, b) in pair()) {
        let lhs = Form::exact(&a.try_add(&b).unwrap());
        prop_assert_eq!(lhs, Form::exact(&a).try_add(&Form::exact(&b)).unwrap());
    }

    #[test]
    fn specialized_corpus_round_trips(q in 1i64..=4, nu in -3i64..=3) {
        prop_assume!(nu != 0);
        let set = Specialization::from([
            ("q".to_string(), BigRational::from_integer(q.into())),
            ("nu".to_string(), BigRational::from_integer(nu.into())),
        ]);
        let printed = corpus::load(&set).unwrap().print();
        prop_assert_eq!(Document::parse(&printed, &Specialization::new()).unwrap().print(), printed);
    }
}

#[test]
fn reports_are_deterministic() {
    let doc = corpus::load(&Specialization::new()).unwrap();
    let cfg = SuiteConfig::new(Suite::Hopf, 2);
    let strip = |mut r: qpfb_core::report::Report| {
        r.zero_timings();
        format!("{r:?}")
    };
    let a = strip(run_suite(&doc, &cfg).unwrap());
    let b = strip(run_suite(&doc, &cfg).unwrap());
    assert_eq!(a, b);
}

#[test]
fn standard_hopf_algebras_certify() {
    for name in corpus::STANDARD_HOPF {
        assert_eq!(corpus::standard_hopf(name).unwrap().name(), name);
    }
}
