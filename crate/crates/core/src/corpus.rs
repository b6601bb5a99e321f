//! The shipped presentation files: the standard Hopf algebras and the quantum
//! tube with its gauge families, connection and corepresentation.

use std::sync::Arc;

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::format::{Document, Specialization};
use crate::gauge::{build_gauge_from_family, verify_gauge, CompatibilityOrder, GaugeFamily, GaugeTransformation};
use crate::hopf::{check_hopf_axioms, HopfAlgebra};
use crate::report::{check, first_witness, Outcome, Report, Witness};
use crate::Scalar;

pub const HOPF: &str = include_str!("../corpus/hopf.qpfb");
pub const EXAMPLE: &str = include_str!("../corpus/example.qpfb");
pub const IDEAL: &str = include_str!("../corpus/ideal.qpfb");

/// File names and contents, in load order.
pub const FILES: [(&str, &str); 3] = [("hopf.qpfb", HOPF), ("example.qpfb", EXAMPLE), ("ideal.qpfb", IDEAL)];

pub const STANDARD_HOPF: [&str; 3] = ["U1", "S1", "SUnu2"];

/// Degree at which [`standard_hopf`] certifies the axioms.
pub const CERTIFY_DEGREE: usize = 3;

fn parse_error(e: crate::format::ParseError) -> Error {
    Error::Unsupported(format!("shipped corpus: {e}"))
}

/// Parses the shipped files under a specialization.
pub fn load(set: &Specialization) -> Result<Document> {
    let mut doc = Document::new();
    for (name, text) in FILES {
        doc.add_file(Some(name), text, set).map_err(parse_error)?;
    }
    Ok(doc)
}

/// One of `U1`, `S1`, `SUnu2`, with its axioms checked up to
/// [`CERTIFY_DEGREE`].
pub fn standard_hopf(name: &str) -> Result<Arc<HopfAlgebra<Scalar>>> {
    if !STANDARD_HOPF.contains(&name) {
        return Err(Error::UnknownHopf(name.to_string()));
    }
    let doc = Document::parse(HOPF, &Specialization::new()).map_err(parse_error)?;
    let h = doc.hopfs[name].clone();
    let report = check_hopf_axioms(&h, CERTIFY_DEGREE);
    if let Some(r) = report.failures().next() {
        return Err(Error::InvalidPresentation { name: name.to_string(), reason: format!("{} fails", r.name) });
    }
    Ok(h)
}

#[derive(Clone, Debug)]
pub struct ExampleConfig {
    /// Index of the family `tau_1(alpha) = x^n`, `tau_2 = id^{*n}`.
    pub n: u32,
    pub set: Specialization,
    pub degree: usize,
}

impl ExampleConfig {
    pub fn new(n: u32) -> Self {
        ExampleConfig { n, set: Specialization::new(), degree: 2 }
    }
}

/// Declarations of the family `g<n>` in the shipped format.
pub fn family_block(n: u32) -> String {
    let pow = |g: &str| vec![g; n as usize].join(" ");
    let tau2 = if n == 1 { "id".to_string() } else { format!("convpow(id, {n})") };
    format!(
        "morphism tau1_{n}: SUnu2 -> B1\n  map alpha = {}\n  map alpha* = {}\n  map gamma = 0\n  map gamma* = 0\n\n\
         gauge family g{n}: tube left\n  tau 1 = hom(tau1_{n})\n  tau 2 = {tau2}\n",
        pow("x"),
        pow("x*"),
    )
}

/// The family `g<n>` in a document holding the shipped example, adding its
/// declarations when they are missing.
pub fn example_family(doc: &mut Document, n: u32, set: &Specialization) -> Result<GaugeFamily<Scalar>> {
    if n == 0 {
        return Err(Error::InvalidPower(0));
    }
    let name = format!("g{n}");
    if !doc.families.contains_key(&name) {
        doc.add_file(Some("generated"), &family_block(n), set).map_err(parse_error)?;
    }
    Ok(doc.families[&name].family.clone())
}

pub struct Example {
    pub document: Document,
    pub bundle: Arc<Bundle<Scalar>>,
    pub transformation: GaugeTransformation<Scalar>,
    pub report: Report,
}

/// The compatibility identity in the form
/// `pi^1_2(tau_1(h)) = sum tau_12(h_1) pi^2_1(tau_2(h_2)) tau_21(h_3)` on
/// the generators of the fibre.
pub fn check_generator_compatibility(family: &GaugeFamily<Scalar>) -> Report {
    let mut report = Report::new();
    let bundle = family.bundle();
    let fibre = bundle.fibre();
    for (i, j) in bundle.overlap_pairs() {
        let label = bundle.pair_label(i, j);
        report.push(check(
            format!("{}: compatibility identity on {label} for generators", family.name()),
            "family.compatibility-printed",
            || {
                let gens = fibre.algebra().generators().len() as u16;
                let mut err = None;
                let w = first_witness(0..gens, |g| {
                    let w = crate::ncpoly::Word::letter(g);
                    match family.compatibility_sides(i, j, &w, CompatibilityOrder::Printed) {
                        Ok((lhs, rhs)) => (lhs != rhs).then(|| Witness::new(fibre.word_string(&w), lhs, rhs)),
                        Err(e) => {
                            err = Some(e.to_string());
                            Some(Witness::new(fibre.word_string(&w), "", ""))
                        }
                    }
                });
                match err {
                    Some(e) => Outcome::Fail(w.expect("witness recorded"), e),
                    None => Outcome::from_witness(w, format!("{gens} generators"), "compatibility fails"),
                }
            },
        ));
    }
    report
}

/// Builds the tube, the transformation `g<n>` and its report: the
/// compatibility identity on generators and [`verify_gauge`].
pub fn build_example(cfg: &ExampleConfig) -> Result<Example> {
    let mut document = load(&cfg.set)?;
    let family = example_family(&mut document, cfg.n, &cfg.set)?;
    let bundle = family.bundle().clone();
    let mut report = check_generator_compatibility(&family);
    let transformation = build_gauge_from_family(family, cfg.degree)?;
    report.extend(verify_gauge(&transformation, cfg.degree));
    Ok(Example { document, bundle, transformation, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_families_match_template() {
        for n in 1..=2 {
            assert!(EXAMPLE.contains(&family_block(n)), "g{n}");
        }
    }

    #[test]
    fn unknown_hopf_is_rejected() {
        assert!(matches!(standard_hopf("bogus"), Err(Error::UnknownHopf(_))));
    }

    #[test]
    fn u1_is_group_like() {
        let h = standard_hopf("U1").unwrap();
        let p = h.algebra();
        let a = crate::ncpoly::Element::word(p, "a").unwrap();
        assert_eq!(h.coproduct(&a).to_string(), "a (x) a");
        assert_eq!(h.antipode(&a).to_string(), "a*");
    }
}
