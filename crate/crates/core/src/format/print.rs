//! Canonical printing of a [`Document`].

use std::fmt::Write;

use crate::calculus::FirstOrderCalculus;
use crate::ncpoly::{write_term, Presentation};
use crate::Scalar;

use super::{Decl, Document};

fn pair(a: &str, b: &str) -> String {
    if a.chars().count() == 1 && b.chars().count() == 1 {
        format!("{a}{b}")
    } else {
        format!("{a} {b}")
    }
}

fn algebra(out: &mut String, p: &Presentation<Scalar>) {
    let _ = writeln!(out, "algebra {}", p.name());
    if !p.params().is_empty() {
        let _ = writeln!(out, "  params {}", p.params().join(", "));
    }
    let _ = writeln!(out, "  gens {}", p.generators().join(", "));
    for (a, b) in p.star_pairs() {
        let _ = writeln!(out, "  star {} <-> {}", p.generator_name(a), p.generator_name(b));
    }
    for rule in p.rules() {
        let mut rhs = String::new();
        for (k, (w, c)) in rule.rhs.iter().enumerate() {
            write_term(&mut rhs, k == 0, c, &p.word_string(w));
        }
        if rhs.is_empty() {
            rhs.push('0');
        }
        let _ = writeln!(out, "  rule {} -> {rhs}", p.word_string(&rule.lhs));
    }
}

pub(super) fn print(doc: &Document) -> String {
    let mut out = String::new();
    for (k, decl) in doc.order.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        match decl {
            Decl::Algebra(name) => algebra(&mut out, &doc.algebras[name]),
            Decl::Hopf(name) => {
                let h = &doc.hopfs[name];
                let p = h.algebra();
                let n = p.generators().len() as u16;
                let _ = writeln!(out, "hopf {name}");
                for g in 0..n {
                    let _ = writeln!(out, "  Delta {} = {}", p.generator_name(g), h.generator_coproduct(g));
                }
                for g in 0..n {
                    let _ = writeln!(out, "  eps {} = {}", p.generator_name(g), h.generator_counit(g));
                }
                for g in 0..n {
                    let _ = writeln!(out, "  S {} = {}", p.generator_name(g), h.antipode_map().images()[g as usize]);
                }
                if let Some(sinv) = h.antipode_inv_map() {
                    for g in 0..n {
                        let _ = writeln!(out, "  Sinv {} = {}", p.generator_name(g), sinv.images()[g as usize]);
                    }
                }
            }
            Decl::Morphism(name) => {
                let m = &doc.morphisms[name];
                let _ = writeln!(out, "morphism {name}: {} -> {}", m.source().name(), m.target().name());
                for (g, img) in m.images().iter().enumerate() {
                    let _ = writeln!(out, "  map {} = {img}", m.source().generator_name(g as u16));
                }
            }
            Decl::Bundle(name) => {
                let b = &doc.bundles[name];
                let _ = writeln!(out, "bundle {name}: {}", b.fibre().name());
                let labels: Vec<&str> = b.charts().iter().map(|c| c.label.as_str()).collect();
                for c in b.charts() {
                    let _ = writeln!(out, "  chart {} = {}", c.label, c.algebra.name());
                }
                for (i, j) in b.overlap_pairs() {
                    let o = b.overlap(i, j).expect("listed overlap");
                    let _ = writeln!(out, "  overlap {} = {}", pair(labels[i], labels[j]), o.algebra.name());
                    for (a, c) in [(i, j), (j, i)] {
                        let o = b.overlap(a, c).expect("both orders");
                        let _ = writeln!(out, "  restrict {}: {}", pair(labels[a], labels[c]), o.restriction.name());
                    }
                    for (a, c) in [(i, j), (j, i)] {
                        if let Some(m) = &b.overlap(a, c).expect("both orders").declared {
                            let _ = writeln!(out, "  transition {}: {}", pair(labels[a], labels[c]), m.name());
                        }
                    }
                }
            }
            Decl::Family(name) => {
                let decl = &doc.families[name];
                let f = &decl.family;
                let _ = writeln!(out, "gauge family {name}: {} {}", f.bundle().name(), f.side());
                for (i, c) in f.bundle().charts().iter().enumerate() {
                    let _ = writeln!(out, "  tau {} = {}", c.label, f.tau(i));
                    if decl.explicit_inverse[i] {
                        let _ = writeln!(out, "  tauinv {} = {}", c.label, f.tau_inv(i));
                    }
                }
            }
            Decl::Connection(name) => {
                let decl = &doc.connections[name];
                let a = &decl.connection;
                let _ = writeln!(out, "connection {name}: {} -> {} {}", a.fibre().name(), a.algebra().name(), a.side());
                if let Some((fam, chart)) = &decl.gauge {
                    let _ = writeln!(out, "  gauge {fam} {chart}");
                }
                for (w, v) in a.table_entries().into_iter().flatten() {
                    let _ = writeln!(out, "  value {} = {v}", a.fibre().word_string(w));
                }
            }
            Decl::Corep(name) => {
                let decl = &doc.coreps[name];
                let _ = writeln!(out, "corep {name}: {}", decl.corep.hopf.name());
                for row in &decl.corep.entries {
                    let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
                    let _ = writeln!(out, "  row {}", cells.join(", "));
                }
                if let Some(g) = &decl.gauge {
                    let _ = writeln!(out, "  gauge {g}");
                }
            }
            Decl::Ideal(name) => {
                let decl = &doc.ideals[name];
                let alg = decl.calculus.algebra();
                let _ = writeln!(out, "ideal {name}: {} -> {} {}", decl.fibre.name(), alg.name(), decl.gauge.side);
                match &decl.calculus {
                    FirstOrderCalculus::Universal(_) => {
                        let _ = writeln!(out, "  calculus universal");
                    }
                    FirstOrderCalculus::Derivation { partials, .. } => {
                        let _ = writeln!(out, "  calculus derivation");
                        for (g, e) in partials.iter().enumerate() {
                            if !e.is_zero() {
                                let _ = writeln!(out, "  partial {} = {e}", alg.generator_name(g as u16));
                            }
                        }
                    }
                }
                let _ = writeln!(out, "  tau = {}", decl.gauge.tau);
                if decl.explicit_inverse {
                    let _ = writeln!(out, "  tauinv = {}", decl.gauge.tau_inv);
                }
                for g in &decl.generators {
                    let _ = writeln!(out, "  gen {g}");
                }
                if let Some(c) = &decl.connection {
                    let _ = writeln!(out, "  connection {c}");
                }
            }
        }
    }
    out
}
