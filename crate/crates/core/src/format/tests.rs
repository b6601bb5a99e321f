use super::*;
use crate::corpus;
use num_traits::One;

fn none() -> Specialization {
    Specialization::new()
}

fn corpus_doc() -> Document {
    corpus::load(&none()).unwrap()
}

fn err(text: &str) -> ParseError {
    Document::parse(text, &none()).unwrap_err()
}

/// Drops comments and blank lines.
fn strip(text: &str) -> String {
    let mut out = String::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap().trim_end();
        if !line.trim().is_empty() {
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

#[test]
fn corpus_round_trips() {
    let doc = corpus_doc();
    let printed = doc.print();
    let again = Document::parse(&printed, &none()).unwrap().print();
    assert_eq!(printed, again);
    let shipped: String = corpus::FILES.iter().map(|(_, t)| strip(t)).collect();
    assert_eq!(strip(&printed), shipped);
}

#[test]
fn b1_file() {
    let doc = corpus_doc();
    let b1 = &doc.algebras["B1"];
    assert_eq!(b1.generators(), ["x", "x*", "y"]);
    assert_eq!(b1.rules().len(), 4);
    let y = b1.generator("y").unwrap();
    assert_eq!(b1.star_of(y), Some(y));
    assert_eq!(b1.params(), ["q"]);
}

#[test]
fn empty_generator_list() {
    let e = err("algebra A\n  gens\n");
    assert_eq!(e.kind, ParseErrorKind::Semantic);
    assert_eq!(e.line, 2);
    assert!(e.message.contains("empty generator list"), "{e}");
    assert_eq!(err("algebra A\n").kind, ParseErrorKind::Semantic);
}

#[test]
fn undefined_symbol_is_named() {
    let e = err("algebra A\n  gens x, y\n  rule y x -> z x y\n");
    assert_eq!((e.line, e.col, e.kind), (3, 15, ParseErrorKind::Semantic));
    assert!(e.message.contains("`z`"), "{e}");
    let e = err("algebra A\n  gens x, y\n  rule y w -> x y\n");
    assert_eq!((e.line, e.col), (3, 10));
}

#[test]
fn rules_must_lower_degree() {
    let e = err("algebra A\n  gens x, y\n  rule x y -> y x\n");
    assert_eq!(e.kind, ParseErrorKind::Semantic);
    assert!(e.message.contains("not degree-lowering"), "{e}");
    assert!(err("algebra A\n  gens x\n  rule x -> x x\n").message.contains("degree-lowering"));
}

#[test]
fn syntax_errors_have_columns() {
    let e = err("algebra A\n  gens x, y\n  rule y x -> (x y\n");
    assert_eq!((e.line, e.kind), (3, ParseErrorKind::Syntax));
    assert_eq!(e.col, 19);
    let e = err("  gens x\n");
    assert_eq!((e.line, e.col, e.kind), (1, 3, ParseErrorKind::Syntax));
    let e = err("algebra A\n  gens x\n  frobnicate\n");
    assert_eq!((e.line, e.col), (3, 3));
    let shown = Document::new().add_file(Some("f.qpfb"), "algebra A\n  gens x ?\n", &none()).unwrap_err();
    assert_eq!(shown.to_string(), "f.qpfb:2:10: syntax error: bad generator name `?`");
}

#[test]
fn specialization_substitutes_parameters() {
    let set = Specialization::from([("q".to_string(), BigRational::one())]);
    let mut doc = Document::new();
    for (name, text) in corpus::FILES {
        doc.add_file(Some(name), text, &set).unwrap();
    }
    let b1 = &doc.algebras["B1"];
    assert!(b1.params().is_empty());
    assert!(doc.print().contains("rule y x -> x y"));
    let zero = Specialization::from([("q".to_string(), BigRational::from_integer(0.into()))]);
    let e = Document::parse(corpus::EXAMPLE.split("morphism").next().unwrap(), &zero).unwrap_err();
    assert!(e.message.contains("invertible"), "{e}");
}

#[test]
fn references_must_exist() {
    let e = err("morphism f: A -> B\n");
    assert!(e.message.contains("unknown algebra `A`"), "{e}");
    let mut doc = corpus_doc();
    let e = doc.add_file(None, "gauge family g9: tube left\n  tau 1 = hom(nope)\n  tau 2 = id\n", &none()).unwrap_err();
    assert_eq!((e.line, e.col), (2, 15));
    let e = doc.add_file(None, "gauge family g9: tube left\n  tau 1 = counit\n", &none()).unwrap_err();
    assert!(e.message.contains("no `tau 2`"), "{e}");
}

#[test]
fn linear_maps_round_trip() {
    let mut doc = corpus_doc();
    let text = "gauge family h: tube left\n  tau 1 = table { 1: 1; alpha: x; alpha*: x* }\n  tauinv 1 = table { 1: 1; alpha: x*; alpha*: x }\n  tau 2 = conv(id, compose_S(compose_Sinv(id)))\n  tauinv 2 = conv_op(counit, convpow(compose_S(id), 2))\n";
    doc.add_file(None, text, &none()).unwrap();
    let printed = doc.print();
    assert!(printed.contains(text), "{printed}");
    assert_eq!(Document::parse(&printed, &none()).unwrap().print(), printed);
}

#[test]
fn chart_pairs_may_be_spaced() {
    let mut doc = corpus_doc();
    let text = "bundle tube2: SUnu2\n  chart 1 = B1\n  chart 2 = SUnu2\n  overlap 1 2 = S1\n  restrict 12: pi12\n  restrict 2 1: pi21\n  transition 12: tau12\n";
    doc.add_file(None, text, &none()).unwrap();
    let e = doc.add_file(None, &text.replace("tube2", "tube3").replace("overlap 1 2", "overlap 13"), &none()).unwrap_err();
    assert!(e.message.contains("pair of charts"), "{e}");
}

#[test]
fn duplicate_names_are_rejected() {
    let e = err("algebra A\n  gens x\nalgebra A\n  gens y\n");
    assert_eq!((e.line, e.col), (3, 9));
}
