//! Verification suites over a parsed document.

use std::fmt;
use std::str::FromStr;

use num_traits::One;

use crate::calculus::{check_curvature_covariance, check_ideal_conditions, gauge_transform_connection, LocalGauge};
use crate::corpus;
use crate::error::Result;
use crate::format::{Document, Specialization};
use crate::gauge::{
    agreement_witness, build_gauge_from_family, check_family, corep_failure_record, corep_matrix_check,
    find_non_automorphism_witness, identity_witness, verify_gauge, GaugeTransformation,
};
use crate::hopf::{check_conv_inverse, check_hopf_axioms, Antipode, InverseSide, LinMap};
use crate::ncpoly::check_presentation;
use crate::report::{check, first_witness, CheckRecord, Outcome, Report, Witness};
use crate::Scalar;

pub const MAX_DEGREE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Hopf,
    Bundle,
    Gauge,
    Connection,
    Example,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["hopf", "bundle", "gauge", "connection", "example", "all"];

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(Suite::NAMES[*self as usize])
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let all = [Suite::Hopf, Suite::Bundle, Suite::Gauge, Suite::Connection, Suite::Example, Suite::All];
        all.into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| format!("unknown suite `{s}` (expected one of {})", Suite::NAMES.join(", ")))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub degree: usize,
    /// Specialization used by the example suite when it reloads the shipped
    /// corpus.
    pub set: Specialization,
}

impl SuiteConfig {
    pub fn new(suite: Suite, degree: usize) -> Self {
        SuiteConfig { suite, degree, set: Specialization::new() }
    }
}

/// Runs the selected suites. Records come out in a fixed order: suites in
/// the order of [`Suite::NAMES`], declarations by name within a suite.
pub fn run_suite(doc: &Document, cfg: &SuiteConfig) -> Result<Report> {
    let d = cfg.degree;
    let mut report = Report::new();
    if cfg.suite.includes(Suite::Hopf) {
        report.extend(hopf_suite(doc, d));
    }
    if cfg.suite.includes(Suite::Bundle) {
        for b in doc.bundles.values() {
            report.extend(crate::bundle::check_bundle(b, d));
        }
    }
    if cfg.suite.includes(Suite::Gauge) {
        report.extend(gauge_suite(doc, d));
    }
    if cfg.suite.includes(Suite::Connection) {
        report.extend(connection_suite(doc, d));
    }
    if cfg.suite.includes(Suite::Example) {
        report.extend(example_suite(&cfg.set, d)?);
    }
    Ok(report)
}

/// Confluence of every presentation (critical pairs up to `degree + 1`
/// letters) and the Hopf axioms of every Hopf algebra.
pub fn hopf_suite(doc: &Document, degree: usize) -> Report {
    let mut report = Report::new();
    for (name, p) in &doc.algebras {
        let pr = check_presentation(p, degree + 1);
        report.push(check(format!("{name}: local confluence"), "presentation.confluence", || {
            let w = pr.failures.first().map(|f| Witness::new(&f.word, &f.left, &f.right));
            Outcome::from_witness(w, format!("{} critical pairs", pr.pairs_checked), "critical pair does not resolve")
        }));
        if p.has_star() {
            report.push(check(format!("{name}: star respects the rules"), "presentation.star", || {
                let w = pr.star_failures.first().map(|v| Witness::new(&v.subject, &v.lhs, &v.rhs));
                Outcome::from_witness(w, "all rules", "star does not respect a rule")
            }));
        }
    }
    for h in doc.hopfs.values() {
        report.extend(check_hopf_axioms(h, degree));
    }
    report
}

/// Non-automorphism search as a record that passes either way and carries
/// the witness when one exists.
fn non_automorphism_record(t: &GaugeTransformation<Scalar>, degree: usize) -> CheckRecord {
    let name = t.family().name();
    let mut found = None;
    let mut rec = check(format!("{name}: multiplicativity"), "gauge.non-automorphism", || {
        match find_non_automorphism_witness(t, degree) {
            Err(e) => Outcome::Fail(Witness::new(name, "", ""), e.to_string()),
            Ok(None) => Outcome::Pass(format!("multiplicative on sampled pairs up to degree {degree}")),
            Ok(Some(w)) => {
                let detail = match w.ratio() {
                    Some(c) => format!("not an algebra map: alpha(f) alpha(g) = ({c}) alpha(f g)"),
                    None => "not an algebra map".to_string(),
                };
                found = Some(w.witness());
                Outcome::Pass(detail)
            }
        }
    });
    rec.witness = found;
    rec
}

/// Family checks, [`verify_gauge`] for families that glue and the
/// corepresentation matrices of each family.
pub fn gauge_suite(doc: &Document, degree: usize) -> Report {
    let mut report = Report::new();
    for (name, decl) in &doc.families {
        let (r, t) = check_family(&decl.family, degree);
        report.extend(r);
        let Some(t) = t else { continue };
        report.push(non_automorphism_record(&t, degree));
        for (cname, c) in &doc.coreps {
            if c.gauge.as_deref() != Some(name) {
                continue;
            }
            match corep_matrix_check(&t, &c.corep, degree) {
                Ok((_, r)) => report.extend(r),
                Err(e) => report.push(corep_failure_record(cname, &e)),
            }
        }
    }
    report
}

/// Connections (identity gauge and covariance under their gauge) and the
/// ideal conditions.
pub fn connection_suite(doc: &Document, degree: usize) -> Report {
    let mut report = Report::new();
    for (name, decl) in &doc.connections {
        let a = &decl.connection;
        report.push(check(format!("{name}: identity gauge leaves A unchanged"), "connection.identity", || {
            let id = LocalGauge::identity(a.fibre(), a.algebra(), a.side());
            match gauge_transform_connection(a, &id) {
                Err(e) => Outcome::Fail(Witness::new(name, "", ""), e.to_string()),
                Ok(a2) => {
                    let basis = a.fibre().basis(degree);
                    let w = first_witness(&basis, |w| {
                        let (x, y) = (a.eval_word(w), a2.eval_word(w));
                        (x.terms() != y.terms()).then(|| Witness::new(a.fibre().word_string(w), y, x))
                    });
                    Outcome::from_witness(w, format!("words up to degree {degree}"), "A' != A")
                }
            }
        }));
        if let Some((fam, chart)) = &decl.gauge {
            let family = &doc.families[fam].family;
            let i = family.bundle().chart_index(chart).expect("checked at parse time");
            report.extend(check_curvature_covariance(a, &LocalGauge::from_family(family, i), degree));
        }
    }
    for decl in doc.ideals.values() {
        let conn = decl.connection.as_ref().map(|c| &doc.connections[c].connection);
        let mut r = check_ideal_conditions(&decl.calculus, &decl.gauge, &decl.generators, conn, degree);
        for rec in &mut r.records {
            rec.name = format!("{}: {}", decl.name, rec.name);
        }
        report.extend(r);
    }
    report
}

/// Value of `q` under a specialization.
fn q_value(set: &Specialization) -> Scalar {
    match set.get("q") {
        Some(v) => Scalar::constant(v.clone()),
        None => Scalar::param("q", 1),
    }
}

/// The shipped tube example: for the families `g<n>`, the compatibility
/// identity on generators and the convolution inverses (`n <= 3`), gauge
/// verification (`n <= 2`), the group laws and the non-automorphism
/// witness, which must scale by exactly `q` (and vanish at `q = 1`).
pub fn example_suite(set: &Specialization, degree: usize) -> Result<Report> {
    let mut doc = corpus::load(set)?;
    let mut report = Report::new();
    let mut built = Vec::new();
    for n in 1..=3 {
        let family = corpus::example_family(&mut doc, n, set)?;
        report.extend(corpus::check_generator_compatibility(&family));
        let fibre = family.bundle().fibre().clone();
        let tau1 = family.tau(0);
        report.push(check_conv_inverse(tau1, &tau1.precompose(Antipode::S)?, degree, InverseSide::Both, false));
        let id = LinMap::identity(&fibre);
        let tau2 = family.tau(1);
        report.push(check_conv_inverse(tau2, &LinMap::conv_power(&id, n as i64, true)?, degree, InverseSide::Both, false));
        if n <= 2 {
            let t = build_gauge_from_family(family, degree)?;
            report.extend(verify_gauge(&t, degree));
            built.push(t);
        }
    }
    let (g1, g2) = (&built[0], &built[1]);
    report.push(check("g1 o g1^-1 = id", "gauge.group-inverse", || match g1.compose(&g1.invert()) {
        Err(e) => Outcome::Fail(Witness::new("g1", "", ""), e.to_string()),
        Ok(c) => match identity_witness(&c, degree) {
            Ok(w) => Outcome::from_witness(w, format!("total-space monomials up to degree {degree}"), "not the identity"),
            Err(e) => Outcome::Fail(Witness::new("g1", "", ""), e.to_string()),
        },
    }));
    report.push(check("g1 o g1 = g2", "gauge.group-compose", || match g1.compose(g1) {
        Err(e) => Outcome::Fail(Witness::new("g1", "", ""), e.to_string()),
        Ok(c) => match agreement_witness(&c, g2, degree) {
            Ok(w) => Outcome::from_witness(w, format!("total-space monomials up to degree {degree}"), "g1 o g1 != g2"),
            Err(e) => Outcome::Fail(Witness::new("g1", "", ""), e.to_string()),
        },
    }));
    let q = q_value(set);
    report.push(check("g1: non-automorphism scales by q", "gauge.non-automorphism", || {
        match find_non_automorphism_witness(g1, degree) {
            Err(e) => Outcome::Fail(Witness::new("g1", "", ""), e.to_string()),
            Ok(None) if q.is_one() => Outcome::Pass(format!("q = 1: multiplicative up to degree {degree}")),
            Ok(None) => Outcome::Fail(Witness::new("g1", "no witness", format!("ratio {q}")), "expected a witness".to_string()),
            Ok(Some(w)) => match w.ratio() {
                Some(c) if c == q && !q.is_one() => Outcome::Pass(format!("alpha(f) alpha(g) = ({c}) alpha(f g)")),
                c => {
                    let got = c.map(|c| c.to_string()).unwrap_or_else(|| "no scalar ratio".into());
                    Outcome::Fail(w.witness(), format!("ratio {got}, expected {q}"))
                }
            },
        }
    }));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().to_string(), name);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn shipped_suites_pass() {
        let doc = corpus::load(&Specialization::new()).unwrap();
        for suite in [Suite::Hopf, Suite::Bundle, Suite::Gauge, Suite::Connection] {
            let report = run_suite(&doc, &SuiteConfig::new(suite, 2)).unwrap();
            let failures: Vec<_> = report.failures().collect();
            assert!(failures.is_empty(), "{suite}: {failures:#?}");
            assert!(!report.records.is_empty());
        }
    }

    #[test]
    fn example_suite_passes() {
        let report = example_suite(&Specialization::new(), 2).unwrap();
        let failures: Vec<_> = report.failures().collect();
        assert!(failures.is_empty(), "{failures:#?}");
        let set = Specialization::from([
            ("q".to_string(), num_rational::BigRational::one()),
            ("nu".to_string(), num_rational::BigRational::one()),
        ]);
        let report = example_suite(&set, 2).unwrap();
        let failures: Vec<_> = report.failures().collect();
        assert!(failures.is_empty(), "{failures:#?}");
    }
}
