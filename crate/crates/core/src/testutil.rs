//! Hand-built presentations shared by unit tests.

use std::sync::Arc;

use num_traits::One;

use crate::bundle::{Bundle, BundleBuilder};
use crate::gauge::{GaugeFamily, Side};
use crate::hopf::{HopfAlgebra, LinMap, TensorElement};
use crate::ncpoly::{Element, Morphism, Presentation, PresentationBuilder};
use crate::Scalar;

pub fn q(e: i32) -> Scalar {
    Scalar::param("q", e)
}

pub fn nu(e: i32) -> Scalar {
    Scalar::param("nu", e)
}

pub fn int(n: i64) -> Scalar {
    use crate::scalar::Coeff;
    Scalar::from_integer(n)
}

pub fn b1() -> Arc<Presentation<Scalar>> {
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

pub fn su2() -> Arc<Presentation<Scalar>> {
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

pub fn u1(name: &str, g: &str) -> Arc<Presentation<Scalar>> {
    let gs = format!("{g}*");
    PresentationBuilder::new(name, &[g, &gs])
        .star(g, &gs)
        .rule(&format!("{g} {gs}"), vec![(Scalar::one(), "1")])
        .rule(&format!("{gs} {g}"), vec![(Scalar::one(), "1")])
        .build()
        .unwrap()
}

pub fn w(p: &Arc<Presentation<Scalar>>, text: &str) -> Element<Scalar> {
    Element::word(p, text).unwrap()
}

fn t2(p: &Arc<Presentation<Scalar>>, terms: &[(Scalar, &str, &str)]) -> TensorElement<Scalar> {
    let mut out = TensorElement::zero(&[p.clone(), p.clone()]);
    for (c, a, b) in terms {
        out = &out + &TensorElement::pure(&[&w(p, a), &w(p, b)]).scale(c);
    }
    out
}

fn anti(
    name: &str,
    p: &Arc<Presentation<Scalar>>,
    images: Vec<(&str, Element<Scalar>)>,
) -> Morphism<Scalar> {
    Morphism::new(name, p, p, images, true).unwrap()
}

/// SU_nu(2) with `S(gamma) = s_gamma`.
pub fn su2_hopf_with(s_gamma: Scalar) -> Arc<HopfAlgebra<Scalar>> {
    let p = su2();
    let one = Scalar::one();
    let s = anti(
        "S",
        &p,
        vec![
            ("alpha", w(&p, "alpha*")),
            ("alpha*", w(&p, "alpha")),
            ("gamma", w(&p, "gamma").scale(&s_gamma)),
            ("gamma*", w(&p, "gamma*").scale(&-nu(-1))),
        ],
    );
    let sinv = anti(
        "Sinv",
        &p,
        vec![
            ("alpha", w(&p, "alpha*")),
            ("alpha*", w(&p, "alpha")),
            ("gamma", w(&p, "gamma").scale(&-nu(-1))),
            ("gamma*", w(&p, "gamma*").scale(&-nu(1))),
        ],
    );
    HopfAlgebra::new(
        "SUnu2",
        &p,
        vec![
            ("alpha", t2(&p, &[(one.clone(), "alpha", "alpha"), (-nu(1), "gamma*", "gamma")])),
            ("alpha*", t2(&p, &[(one.clone(), "alpha*", "alpha*"), (-nu(1), "gamma", "gamma*")])),
            ("gamma", t2(&p, &[(one.clone(), "gamma", "alpha"), (one.clone(), "alpha*", "gamma")])),
            ("gamma*", t2(&p, &[(one.clone(), "gamma*", "alpha*"), (one.clone(), "alpha", "gamma*")])),
        ],
        vec![("alpha", one.clone()), ("alpha*", one.clone()), ("gamma", int(0)), ("gamma*", int(0))],
        s,
        Some(sinv),
    )
    .unwrap()
}

pub fn su2_hopf() -> Arc<HopfAlgebra<Scalar>> {
    su2_hopf_with(-nu(1))
}

pub fn u1_hopf() -> Arc<HopfAlgebra<Scalar>> {
    let p = u1("U1", "a");
    let one = Scalar::one();
    let s = anti("S", &p, vec![("a", w(&p, "a*")), ("a*", w(&p, "a"))]);
    let sinv = anti("Sinv", &p, vec![("a", w(&p, "a*")), ("a*", w(&p, "a"))]);
    HopfAlgebra::new(
        "U1",
        &p,
        vec![("a", t2(&p, &[(one.clone(), "a", "a")])), ("a*", t2(&p, &[(one.clone(), "a*", "a*")]))],
        vec![("a", one.clone()), ("a*", one)],
        s,
        Some(sinv),
    )
    .unwrap()
}

pub fn morphism(
    name: &str,
    src: &Arc<Presentation<Scalar>>,
    dst: &Arc<Presentation<Scalar>>,
    images: Vec<(&str, Element<Scalar>)>,
) -> Morphism<Scalar> {
    let mut m = Morphism::new(name, src, dst, images, false).unwrap();
    m.try_certify();
    m
}

/// Two-chart tube bundle: chart 1 is `B1`, chart 2 is the quantum group
/// itself, glued over the circle. `tau12_gamma` overrides `tau_12(gamma)`.
pub fn example_bundle_with(tau12_gamma: Option<&str>) -> Arc<Bundle<Scalar>> {
    let h = su2_hopf();
    let su = h.algebra().clone();
    let b = b1();
    let s1 = u1("S1", "a");
    let zero = Element::zero(&s1);
    let pi12 = morphism("pi12", &b, &s1, vec![("x", w(&s1, "a")), ("x*", w(&s1, "a*")), ("y", zero.clone())]);
    let pi21 = morphism(
        "pi21",
        &su,
        &s1,
        vec![("alpha", w(&s1, "a")), ("alpha*", w(&s1, "a*")), ("gamma", zero.clone()), ("gamma*", zero.clone())],
    );
    let g = tau12_gamma.map(|t| w(&s1, t)).unwrap_or_else(|| zero.clone());
    let tau12 = morphism(
        "tau12",
        &su,
        &s1,
        vec![("alpha", w(&s1, "a")), ("alpha*", w(&s1, "a*")), ("gamma", g), ("gamma*", zero)],
    );
    BundleBuilder::new("tube", &h)
        .chart("1", &b)
        .chart("2", &su)
        .overlap("1", "2", &s1)
        .restriction("1", "2", &Arc::new(pi12))
        .restriction("2", "1", &Arc::new(pi21))
        .transition("1", "2", &Arc::new(tau12))
        .build()
        .unwrap()
}

pub fn example_bundle() -> Arc<Bundle<Scalar>> {
    example_bundle_with(None)
}

/// `tau_1(alpha) = x^n`, `tau_2 = id^{*n}` on the tube bundle.
pub fn example_family(bundle: &Arc<Bundle<Scalar>>, n: u32) -> GaugeFamily<Scalar> {
    let h = bundle.fibre();
    let b = bundle.charts()[0].algebra.clone();
    let zero = Element::zero(&b);
    let m = morphism(
        &format!("tau1_{n}"),
        h.algebra(),
        &b,
        vec![
            ("alpha", w(&b, "x").pow(n)),
            ("alpha*", w(&b, "x*").pow(n)),
            ("gamma", zero.clone()),
            ("gamma*", zero),
        ],
    );
    let tau1 = LinMap::hom(h, &Arc::new(m)).unwrap();
    let tau2 = LinMap::conv_power(&LinMap::identity(h), n as i64, false).unwrap();
    GaugeFamily::new(&format!("g{n}"), bundle, Side::Left, vec![tau1, tau2], vec![None, None]).unwrap()
}
