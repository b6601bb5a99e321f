//! Degree-bounded local confluence certificate for a rewrite system.
//!
//! Every overlap or inclusion of two left-hand sides whose combined word has
//! length at most the bound is reduced both ways; the two normal forms must
//! agree. Passing certifies confluence up to that degree only, which is all
//! the downstream checks rely on.

use std::sync::Arc;

use crate::scalar::Coeff;

use super::element::Element;
use super::morphism::Violation;
use super::presentation::{Presentation, Rule};
use super::word::Word;

/// A critical pair whose two reductions disagree.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPairWitness {
    pub word: String,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug)]
pub struct PresentationReport {
    pub degree: usize,
    pub pairs_checked: usize,
    pub failures: Vec<CriticalPairWitness>,
    pub star_failures: Vec<Violation>,
}

impl PresentationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.star_failures.is_empty()
    }
}

fn reduce_at<R: Coeff>(p: &Arc<Presentation<R>>, w: &Word, pos: usize, rule: &Rule<R>) -> Element<R> {
    let raw: Vec<(Word, R)> = rule
        .rhs
        .iter()
        .map(|(v, c)| (w.splice(pos, pos + rule.lhs.len(), v), c.clone()))
        .collect();
    Element::normalize(p, &raw).unwrap_or_else(|e| panic!("{e}"))
}

/// All critical pairs of total length `<= degree`, as `(word, (rule, pos), (rule, pos))`.
fn critical_pairs<R: Coeff>(p: &Presentation<R>, degree: usize) -> Vec<(Word, (usize, usize), (usize, usize))> {
    let rules = p.rules();
    let mut out = Vec::new();
    for (i, r1) in rules.iter().enumerate() {
        for (j, r2) in rules.iter().enumerate() {
            let (l1, l2) = (r1.lhs.letters(), r2.lhs.letters());
            // proper overlaps: suffix of l1 equals prefix of l2
            for k in 1..l1.len().min(l2.len()) {
                if l1[l1.len() - k..] == l2[..k] {
                    let w = r1.lhs.concat(&Word::new(l2[k..].to_vec()));
                    if w.len() <= degree {
                        out.push((w, (i, 0), (j, l1.len() - k)));
                    }
                }
            }
            // inclusions: l2 inside l1
            if l2.len() <= l1.len() && r1.lhs.len() <= degree {
                for pos in 0..=l1.len() - l2.len() {
                    if i == j && pos == 0 {
                        continue;
                    }
                    if l1[pos..pos + l2.len()] == *l2 {
                        out.push((r1.lhs.clone(), (i, 0), (j, pos)));
                    }
                }
            }
        }
    }
    out
}

/// Checks local confluence and star-compatibility of the rules up to `degree`.
pub fn check_presentation<R: Coeff>(p: &Arc<Presentation<R>>, degree: usize) -> PresentationReport {
    let pairs = critical_pairs(p, degree);
    let mut failures = Vec::new();
    for (w, (i, pi), (j, pj)) in &pairs {
        let left = reduce_at(p, w, *pi, &p.rules()[*i]);
        let right = reduce_at(p, w, *pj, &p.rules()[*j]);
        if left != right {
            failures.push(CriticalPairWitness {
                word: p.word_string(w),
                left: left.to_string(),
                right: right.to_string(),
            });
        }
    }

    let mut star_failures = Vec::new();
    if p.has_star() {
        for rule in p.rules() {
            // star only reads the terms, so the unreduced left-hand side is fine here
            let lhs_raw = Element::from_normal_terms(p, [(rule.lhs.clone(), R::one())].into_iter().collect());
            let rhs = Element::normalize(p, &rule.rhs).unwrap_or_else(|e| panic!("{e}"));
            let a = lhs_raw.star().expect("star declared");
            let b = rhs.star().expect("star declared");
            if a != b {
                star_failures.push(Violation {
                    subject: format!("({})*", p.word_string(&rule.lhs)),
                    lhs: a.to_string(),
                    rhs: b.to_string(),
                });
            }
        }
    }

    PresentationReport { degree, pairs_checked: pairs.len(), failures, star_failures }
}
