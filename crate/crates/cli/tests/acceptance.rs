//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! Built with `harness = false` so the lines are printed by plain
//! `cargo test`.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use num_rational::BigRational;
use num_traits::One;
use qpfb_core::calculus::{check_curvature_covariance, check_ideal_conditions, gauge_transform_connection, LocalGauge};
use qpfb_core::corpus::{self, build_example, check_generator_compatibility, example_family, ExampleConfig};
use qpfb_core::format::{Document, Specialization};
use qpfb_core::gauge::{GaugeTransformation, agreement_witness, build_gauge_from_family, corep_matrix_check, find_non_automorphism_witness, identity_witness};
use qpfb_core::hopf::{check_conv_inverse, check_hopf_axioms, Antipode, InverseSide, LinMap};
use qpfb_core::ncpoly::Element;
use qpfb_core::report::{Report, Status};
use qpfb_core::Scalar;

type Check = Result<String, String>;

fn none() -> Specialization {
    Specialization::new()
}

fn q_nu_one() -> Specialization {
    Specialization::from([("q".to_string(), BigRational::one()), ("nu".to_string(), BigRational::one())])
}

/// The corpus with `g1` and `g2` built from the same document, so their
/// bundles coincide.
fn corpus_gauges() -> Result<(Document, GaugeTransformation<Scalar>, GaugeTransformation<Scalar>), String> {
    let doc = corpus::load(&none()).map_err(|e| e.to_string())?;
    let build = |n: &str| build_gauge_from_family(doc.families[n].family.clone(), 2).map_err(|e| e.to_string());
    let (g1, g2) = (build("g1")?, build("g2")?);
    Ok((doc, g1, g2))
}

fn all_pass(report: &Report) -> Result<(), String> {
    match report.failures().next() {
        None => Ok(()),
        Some(r) => Err(format!("{} [{}]: {} {:?}", r.name, r.anchor, r.detail, r.witness)),
    }
}

fn require_anchors(report: &Report, anchors: &[&str]) -> Result<(), String> {
    let seen: BTreeSet<&str> = report.records.iter().map(|r| r.anchor.as_str()).collect();
    match anchors.iter().find(|a| !seen.contains(*a)) {
        Some(a) => Err(format!("no `{a}` record")),
        None => Ok(()),
    }
}

fn hopf_axioms() -> Check {
    let doc = corpus::load(&none()).map_err(|e| e.to_string())?;
    let mut total = 0;
    for name in corpus::STANDARD_HOPF {
        let report = check_hopf_axioms(&doc.hopfs[name], 3);
        require_anchors(
            &report,
            &["hopf.coassociativity", "hopf.counit", "hopf.antipode", "hopf.coproduct-multiplicative"],
        )?;
        all_pass(&report).map_err(|e| format!("{name}: {e}"))?;
        total += report.records.len();
    }
    Ok(format!("U1, S1, SUnu2 at degree 3: {total} checks"))
}

fn convolution_inverses() -> Check {
    let mut doc = corpus::load(&none()).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for n in 1..=3u32 {
        let family = example_family(&mut doc, n, &none()).map_err(|e| e.to_string())?;
        let fibre = family.bundle().fibre().clone();
        let tau1 = family.tau(0);
        let s1 = tau1.precompose(Antipode::S).map_err(|e| e.to_string())?;
        let tau2 = family.tau(1);
        let s2 = LinMap::conv_power(&LinMap::identity(&fibre), n as i64, true).map_err(|e| e.to_string())?;
        for (f, g) in [(tau1, &s1), (tau2, &s2)] {
            let rec = check_conv_inverse(f, g, 2, InverseSide::Both, false);
            if rec.status != Status::Pass {
                return Err(format!("n = {n}: {} {:?}", rec.detail, rec.witness));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs, n = 1..3, degree 2"))
}

fn compatibility_on_generators() -> Check {
    let mut doc = corpus::load(&none()).map_err(|e| e.to_string())?;
    for n in 1..=3u32 {
        let family = example_family(&mut doc, n, &none()).map_err(|e| e.to_string())?;
        let report = check_generator_compatibility(&family);
        all_pass(&report).map_err(|e| format!("n = {n}: {e}"))?;
        if !report.records.iter().all(|r| r.detail == "4 generators") {
            return Err(format!("n = {n}: not checked on the four generators"));
        }
    }
    Ok("alpha, alpha*, gamma, gamma* for n = 1..3".into())
}

fn gauge_from_family() -> Check {
    for n in 1..=2 {
        let ex = build_example(&ExampleConfig::new(n)).map_err(|e| e.to_string())?;
        require_anchors(
            &ex.report,
            &[
                "gauge.unital",
                "gauge.glued",
                "gauge.coaction-left",
                "gauge.inverse-left",
                "gauge.invertible",
                "gauge.equivariance",
                "gauge.module-left",
                "gauge.kernels",
            ],
        )?;
        all_pass(&ex.report).map_err(|e| format!("n = {n}: {e}"))?;
    }
    Ok("g1, g2 at degree 2".into())
}

fn non_automorphism() -> Check {
    let ex = build_example(&ExampleConfig::new(1)).map_err(|e| e.to_string())?;
    let w = find_non_automorphism_witness(&ex.transformation, 2).map_err(|e| e.to_string())?;
    let w = w.ok_or("no witness with symbolic q")?;
    let q = Scalar::param("q", 1);
    if w.ratio() != Some(q.clone()) {
        return Err(format!("ratio {:?}, expected q", w.ratio().map(|r| r.to_string())));
    }
    let mut cfg = ExampleConfig::new(1);
    cfg.set = q_nu_one();
    let special = build_example(&cfg).map_err(|e| e.to_string())?;
    if let Some(w) = find_non_automorphism_witness(&special.transformation, 2).map_err(|e| e.to_string())? {
        return Err(format!("witness at q = nu = 1: {:?}", w.witness()));
    }
    Ok(format!("factor q at {}; none at q = nu = 1", w.witness().subject))
}

fn group_laws() -> Check {
    let (_, g1, g2) = corpus_gauges()?;
    let id = g1.compose(&g1.invert()).map_err(|e| e.to_string())?;
    if let Some(w) = identity_witness(&id, 2).map_err(|e| e.to_string())? {
        return Err(format!("g1 o g1^-1 != id at {w:?}"));
    }
    let sq = g1.compose(&g1).map_err(|e| e.to_string())?;
    if let Some(w) = agreement_witness(&sq, &g2, 2).map_err(|e| e.to_string())? {
        return Err(format!("g1 o g1 != g2 at {w:?}"));
    }
    Ok("g1 o g1^-1 = id, g1 o g1 = g2 on monomials up to degree 2".into())
}

fn connection_covariance() -> Check {
    let doc = corpus::load(&none()).map_err(|e| e.to_string())?;
    let a = &doc.connections["A"].connection;
    let basis = a.fibre().basis(2);
    if basis.iter().all(|w| a.eval_word(w).is_zero()) {
        return Err("test connection is zero".into());
    }
    let family = &doc.families["g1"].family;
    let report = check_curvature_covariance(a, &LocalGauge::from_family(family, 0), 2);
    require_anchors(&report, &["connection.unital", "curvature.covariance-left"])?;
    all_pass(&report)?;
    let id = LocalGauge::identity(a.fibre(), a.algebra(), a.side());
    let same = gauge_transform_connection(a, &id).map_err(|e| e.to_string())?;
    if let Some(w) = basis.iter().find(|w| same.eval_word(w).terms() != a.eval_word(w).terms()) {
        return Err(format!("identity gauge changes A at {}", a.fibre().word_string(w)));
    }
    Ok(format!("A'(1) = 0, F' covariant on {} words, identity exact", basis.len()))
}

/// `tau(a) = x` into the tube chart. In the derivation calculus with
/// `d(b) = partial(b) theta`, `d(x)` commutes with `x` but `d(y) x = q^-1 x d(y)`.
const NONCENTRAL: &str = "\
morphism tauB: U1 -> B1
  map a = x
  map a* = x*

ideal noncentral: U1 -> B1 left
  calculus derivation
  partial x = x
  partial x* = -x*
  partial y = y
  tau = hom(tauB)
  gen 1 - 2 a + a a
";

fn ideal_conditions() -> Check {
    let mut doc = corpus::load(&none()).map_err(|e| e.to_string())?;
    let central = &doc.ideals["central"];
    let conn = central.connection.as_ref().map(|c| &doc.connections[c].connection);
    let report = check_ideal_conditions(&central.calculus, &central.gauge, &central.generators, conn, 2);
    require_anchors(&report, &["ideal.ad-invariant", "ideal.pure-gauge", "ideal.central", "ideal.transformed-connection"])?;
    all_pass(&report).map_err(|e| format!("central: {e}"))?;

    doc.add_file(Some("noncentral"), NONCENTRAL, &none()).map_err(|e| e.to_string())?;
    let bad = &doc.ideals["noncentral"];
    let report = check_ideal_conditions(&bad.calculus, &bad.gauge, &bad.generators, None, 2);
    let failed: Vec<_> = report.failures().collect();
    let [rec] = failed.as_slice() else {
        return Err(format!("expected exactly the y centrality failure, got {failed:#?}"));
    };
    let w = rec.witness.as_ref().ok_or("failure without witness")?;
    if rec.name != "d(y) commutes with tau" || w.subject != "d(y) tau(a)" || w.lhs == w.rhs {
        return Err(format!("unexpected failure {rec:#?}"));
    }
    Ok(format!("central passes; noncentral fails at {}: {} vs {}", w.subject, w.lhs, w.rhs))
}

fn corep_matrices() -> Check {
    let (doc, t, _) = corpus_gauges()?;
    let u = &doc.coreps["u"].corep;
    let (m, report) = corep_matrix_check(&t, u, 2).map_err(|e| e.to_string())?;
    require_anchors(&report, &["corep.coproduct", "corep.invertible", "corep.overlap"])?;
    all_pass(&report)?;
    for (i, (b, c)) in m.per_chart.iter().zip(&m.inverses).enumerate() {
        let p = b[0][0].presentation();
        for (x, y) in [(b, c), (c, b)] {
            for k in 0..x.len() {
                for l in 0..x.len() {
                    let mut e = Element::zero(p);
                    for j in 0..x.len() {
                        e = &e + &(&x[k][j] * &y[j][l]);
                    }
                    let expect = if k == l { Element::one(p) } else { Element::zero(p) };
                    if e != expect {
                        return Err(format!("chart {}: product entry ({k}, {l}) is {e}", i + 1));
                    }
                }
            }
        }
    }
    let overlaps = report.records.iter().filter(|r| r.anchor == "corep.overlap").count();
    Ok(format!("{} charts invertible, overlap identity on {overlaps} ordered pairs", m.per_chart.len()))
}

fn qpfb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpfb")).args(args).output().expect("run qpfb")
}

fn corpus_text() -> String {
    corpus::FILES.iter().map(|(_, t)| format!("{t}\n")).collect()
}

fn determinism_and_exit_codes() -> Check {
    let doc = corpus::load(&none()).map_err(|e| e.to_string())?;
    let printed = doc.print();
    if Document::parse(&printed, &none()).map_err(|e| e.to_string())?.print() != printed {
        return Err("print o parse is not the identity on the corpus".into());
    }

    let json = ["check", "--suite", "hopf", "--degree", "2", "--json", "--no-timing"];
    let (a, b) = (qpfb(&json), qpfb(&json));
    if a.stdout != b.stdout || a.stdout.is_empty() {
        return Err("json reports differ between runs".into());
    }
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).map_err(|e| e.to_string())?;
    if v["records"].as_array().map_or(true, |r| r.iter().any(|r| r["elapsed_us"] != 0)) {
        return Err("timing not zeroed".into());
    }

    let pass = qpfb(&["check", "--suite", "example", "--degree", "2"]);
    if pass.status.code() != Some(0) {
        return Err(format!("example suite exit {:?}", pass.status.code()));
    }

    let dir = std::env::temp_dir().join(format!("qpfb-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let corrupt = dir.join("corrupt.qpfb");
    let text = corpus_text() + "gauge family bad: tube left\n  tau 1 = hom(tau1_1)\n  tau 2 = convpow(id, 2)\n";
    std::fs::write(&corrupt, text).map_err(|e| e.to_string())?;
    let fail = qpfb(&["check", "--file", path_str(&corrupt), "--suite", "gauge", "--json", "--no-timing"]);
    let v: serde_json::Value = serde_json::from_slice(&fail.stdout).map_err(|e| e.to_string())?;
    let witnessed = v["records"]
        .as_array()
        .is_some_and(|r| r.iter().any(|r| r["status"] == "fail" && r["name"].as_str().is_some_and(|n| n.starts_with("bad")) && !r["witness"].is_null()));
    if fail.status.code() != Some(1) || !witnessed {
        return Err(format!("corrupted family: exit {:?}, witnessed {witnessed}", fail.status.code()));
    }

    let usage = qpfb(&["check", "--suite", "bogus"]);
    let broken = dir.join("broken.qpfb");
    std::fs::write(&broken, "algebra A\n  gens\n").map_err(|e| e.to_string())?;
    let parse = qpfb(&["check", "--file", path_str(&broken)]);
    let _ = std::fs::remove_dir_all(&dir);
    if usage.status.code() != Some(2) || parse.status.code() != Some(2) {
        return Err(format!("usage exit {:?}, parse exit {:?}", usage.status.code(), parse.status.code()));
    }
    let stderr = String::from_utf8_lossy(&parse.stderr);
    if !stderr.contains("broken.qpfb:2:") {
        return Err(format!("parse error without location: {stderr}"));
    }
    Ok("round trip, identical json, exits 0/1/2".into())
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("hopf axioms", hopf_axioms),
        ("convolution inverses", convolution_inverses),
        ("compatibility on generators", compatibility_on_generators),
        ("gauge from family", gauge_from_family),
        ("non-automorphism witness", non_automorphism),
        ("gauge group laws", group_laws),
        ("connection covariance", connection_covariance),
        ("ideal conditions", ideal_conditions),
        ("corepresentation matrices", corep_matrices),
        ("determinism and exit codes", determinism_and_exit_codes),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} ({secs:.1}s)", k + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {e} ({secs:.1}s)", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
