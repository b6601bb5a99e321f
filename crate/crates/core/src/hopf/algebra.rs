use std::sync::Arc;

use crate::error::{Error, Result};
use crate::memo::Memo;
use crate::ncpoly::{Element, Morphism, Presentation, Word};
use crate::report::{check, first_witness, Outcome, Report, Witness};
use crate::scalar::Coeff;

use super::tensor::TensorElement;

/// Hopf structure on a presented algebra, given on generators.
///
/// Construction only validates shapes. The axioms are certified separately
/// by [`check_hopf_axioms`]; the antipode maps are evaluated through their
/// generator images even when uncertified so that a broken antipode shows
/// up as a failed axiom rather than a construction error.
pub struct HopfAlgebra<R> {
    name: String,
    algebra: Arc<Presentation<R>>,
    delta: Vec<TensorElement<R>>,
    eps: Vec<R>,
    antipode: Morphism<R>,
    antipode_inv: Option<Morphism<R>>,
    iterated: Memo<(Word, usize), Arc<TensorElement<R>>>,
}

impl<R: Coeff> std::fmt::Debug for HopfAlgebra<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HopfAlgebra").field("name", &self.name).field("delta", &self.delta).finish()
    }
}

impl<R: Coeff> HopfAlgebra<R> {
    pub fn new(
        name: &str,
        algebra: &Arc<Presentation<R>>,
        delta: Vec<(&str, TensorElement<R>)>,
        eps: Vec<(&str, R)>,
        antipode: Morphism<R>,
        antipode_inv: Option<Morphism<R>>,
    ) -> Result<Arc<Self>> {
        let n = algebra.generators().len();
        let invalid = |reason: String| Error::InvalidPresentation { name: name.to_string(), reason };
        let mut d: Vec<Option<TensorElement<R>>> = vec![None; n];
        for (g, t) in delta {
            let i = algebra.generator(g).ok_or_else(|| Error::UnknownGenerator(g.to_string()))?;
            if t.slots().len() != 2 || !t.slots().iter().all(|s| Arc::ptr_eq(s, algebra)) {
                return Err(invalid(format!("coproduct of `{g}` is not in {0} (x) {0}", algebra.name())));
            }
            d[i as usize] = Some(t);
        }
        let mut e: Vec<Option<R>> = vec![None; n];
        for (g, c) in eps {
            let i = algebra.generator(g).ok_or_else(|| Error::UnknownGenerator(g.to_string()))?;
            e[i as usize] = Some(c);
        }
        let mut delta_out = Vec::with_capacity(n);
        let mut eps_out = Vec::with_capacity(n);
        for (i, (dt, et)) in d.into_iter().zip(e).enumerate() {
            let g = algebra.generator_name(i as u16);
            delta_out.push(dt.ok_or_else(|| invalid(format!("no coproduct for `{g}`")))?);
            eps_out.push(et.ok_or_else(|| invalid(format!("no counit for `{g}`")))?);
        }
        for m in std::iter::once(&antipode).chain(antipode_inv.as_ref()) {
            if !Arc::ptr_eq(m.source(), algebra) || !Arc::ptr_eq(m.target(), algebra) {
                return Err(invalid(format!("`{}` is not a map {0} -> {0}", m.name())));
            }
            if !m.is_antimultiplicative() {
                return Err(invalid(format!("`{}` must be antimultiplicative", m.name())));
            }
        }
        Ok(Arc::new(HopfAlgebra {
            name: name.to_string(),
            algebra: algebra.clone(),
            delta: delta_out,
            eps: eps_out,
            antipode,
            antipode_inv,
            iterated: Memo::new(),
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn algebra(&self) -> &Arc<Presentation<R>> {
        &self.algebra
    }

    pub fn generator_coproduct(&self, g: u16) -> &TensorElement<R> {
        &self.delta[g as usize]
    }

    pub fn generator_counit(&self, g: u16) -> &R {
        &self.eps[g as usize]
    }

    pub fn antipode_map(&self) -> &Morphism<R> {
        &self.antipode
    }

    pub fn antipode_inv_map(&self) -> Option<&Morphism<R>> {
        self.antipode_inv.as_ref()
    }

    pub fn has_antipode_inv(&self) -> bool {
        self.antipode_inv.is_some()
    }

    fn slots(&self, k: usize) -> Vec<Arc<Presentation<R>>> {
        vec![self.algebra.clone(); k]
    }

    /// `k`-fold iterated coproduct of a word (`k + 1` legs), computed
    /// multiplicatively from the generator images. The word need not be
    /// normal.
    pub fn iterated_word(&self, w: &Word, k: usize) -> Arc<TensorElement<R>> {
        if k == 0 {
            let e = Element::from_word(&self.algebra, w, R::one());
            return Arc::new(TensorElement::pure(&[&e]));
        }
        if w.is_empty() {
            return Arc::new(TensorElement::one(&self.slots(k + 1)));
        }
        let key = (w.clone(), k);
        if let Some(t) = self.iterated.get(&key) {
            return t;
        }
        let t = if w.len() == 1 {
            let g = w.letters()[0];
            if k == 1 {
                self.delta[g as usize].clone()
            } else {
                // apply the coproduct to the first leg
                self.iterated_word(w, k - 1)
                    .replace_slot(0, &self.slots(2), |u| (*self.iterated_word(u, 1)).clone())
            }
        } else {
            let n = w.len();
            &*self.iterated_word(&w.subword(0, n - 1), k) * &*self.iterated_word(&w.subword(n - 1, n), k)
        };
        let t = Arc::new(t);
        self.iterated.insert(key, t.clone());
        t
    }

    pub fn coproduct(&self, h: &Element<R>) -> TensorElement<R> {
        self.iterated(h, 1)
    }

    /// Sweedler expansion `sum h_1 (x) ... (x) h_{k+1}`.
    pub fn iterated(&self, h: &Element<R>, k: usize) -> TensorElement<R> {
        let mut out = TensorElement::zero(&self.slots(k + 1));
        for (w, c) in h.terms() {
            out = &out + &self.iterated_word(w, k).scale(c);
        }
        out
    }

    pub fn counit_word(&self, w: &Word) -> R {
        w.letters().iter().fold(R::one(), |acc, g| acc * self.eps[*g as usize].clone())
    }

    pub fn counit(&self, h: &Element<R>) -> R {
        h.terms().iter().fold(R::zero(), |acc, (w, c)| acc + c.clone() * self.counit_word(w))
    }

    pub fn antipode(&self, h: &Element<R>) -> Element<R> {
        self.antipode.map_element(h)
    }

    pub fn antipode_word(&self, w: &Word) -> Element<R> {
        self.antipode.map_word(w)
    }

    pub fn antipode_inv(&self, h: &Element<R>) -> Result<Element<R>> {
        match &self.antipode_inv {
            Some(m) => Ok(m.map_element(h)),
            None => Err(Error::MissingAntipodeInverse(self.name.clone())),
        }
    }

    pub fn antipode_inv_word(&self, w: &Word) -> Result<Element<R>> {
        match &self.antipode_inv {
            Some(m) => Ok(m.map_word(w)),
            None => Err(Error::MissingAntipodeInverse(self.name.clone())),
        }
    }

    /// Normal words of the underlying algebra up to `degree`.
    pub fn basis(&self, degree: usize) -> Vec<Word> {
        self.algebra.normal_words(degree)
    }

    pub fn word_string(&self, w: &Word) -> String {
        self.algebra.word_string(w)
    }

    /// `m(f (x) g)` for a two-slot tensor over the algebra.
    fn multiply(&self, t: &TensorElement<R>) -> Element<R> {
        t.multiply_slots(0).expect("same algebra").into_element().expect("one slot")
    }
}

/// Certifies the Hopf algebra axioms on all normal words up to `degree`:
/// well-definedness of the structure maps on the defining relations,
/// coassociativity, counit, antipode, multiplicativity of the coproduct,
/// the inverse antipode and star-compatibility of the coproduct.
pub fn check_hopf_axioms<R: Coeff>(h: &HopfAlgebra<R>, degree: usize) -> Report {
    let mut report = Report::new();
    let a = h.algebra();
    let basis = h.basis(degree);
    let name = h.name();
    let one = Element::one(a);
    let two = vec![a.clone(), a.clone()];

    report.push(check(format!("{name}: coproduct respects relations"), "hopf.coproduct-well-defined", || {
        let w = first_witness(a.rules(), |rule| {
            let lhs = (*h.iterated_word(&rule.lhs, 1)).clone();
            let mut rhs = TensorElement::zero(&two);
            for (v, c) in &rule.rhs {
                rhs = &rhs + &h.iterated_word(v, 1).scale(c);
            }
            (lhs != rhs).then(|| Witness::new(a.word_string(&rule.lhs), &lhs, &rhs))
        });
        Outcome::from_witness(w, format!("{} relations", a.rules().len()), "coproduct is not an algebra map")
    }));

    report.push(check(format!("{name}: counit respects relations"), "hopf.counit-well-defined", || {
        let w = first_witness(a.rules(), |rule| {
            let lhs = h.counit_word(&rule.lhs);
            let rhs = rule.rhs.iter().fold(R::zero(), |acc, (v, c)| acc + c.clone() * h.counit_word(v));
            (lhs != rhs).then(|| Witness::new(a.word_string(&rule.lhs), &lhs, &rhs))
        });
        Outcome::from_witness(w, format!("{} relations", a.rules().len()), "counit is not an algebra map")
    }));

    report.push(check(format!("{name}: antipode respects relations"), "hopf.antipode-well-defined", || {
        let w = h.antipode_map().relation_violations().into_iter().next();
        Outcome::from_witness(
            w.map(|v| Witness::new(v.subject, v.lhs, v.rhs)),
            "antimultiplicative extension is well defined",
            "antipode images violate a relation",
        )
    }));

    report.push(check(format!("{name}: coassociativity"), "hopf.coassociativity", || {
        let w = first_witness(&basis, |w| {
            let d = h.iterated_word(w, 1);
            let left = d.replace_slot(0, &two, |u| (*h.iterated_word(u, 1)).clone());
            let right = d.replace_slot(1, &two, |u| (*h.iterated_word(u, 1)).clone());
            (left != right).then(|| Witness::new(h.word_string(w), &left, &right))
        });
        Outcome::from_witness(w, format!("{} words up to degree {degree}", basis.len()), "(D (x) id) D != (id (x) D) D")
    }));

    report.push(check(format!("{name}: counit axiom"), "hopf.counit", || {
        let w = first_witness(&basis, |w| {
            let d = h.iterated_word(w, 1);
            let expect = Element::from_word(a, w, R::one());
            for k in 0..2 {
                let t = d.replace_slot(k, &[], |u| TensorElement::scalar(h.counit_word(u)));
                let got = t.into_element().expect("one slot");
                if got != expect {
                    let side = if k == 0 { "(e (x) id) D" } else { "(id (x) e) D" };
                    return Some(Witness::new(format!("{side} on {}", h.word_string(w)), &got, &expect));
                }
            }
            None
        });
        Outcome::from_witness(w, format!("{} words up to degree {degree}", basis.len()), "counit axiom fails")
    }));

    report.push(check(format!("{name}: antipode axiom"), "hopf.antipode", || {
        let failing = |w: &Word| -> Option<Witness> {
            let d = h.iterated_word(w, 1);
            let expect = one.scale(&h.counit_word(w));
            for k in 0..2 {
                let t = d.map_slot(k, a, |u| h.antipode_word(u));
                let got = h.multiply(&t);
                if got != expect {
                    let side = if k == 0 { "m(S (x) id) D" } else { "m(id (x) S) D" };
                    return Some(Witness::new(format!("{side} on {}", h.word_string(w)), &got, &expect));
                }
            }
            None
        };
        // every failing word is listed: a wrong antipode value on one generator
        // usually breaks the axiom on several
        let bad: Vec<String> = basis.iter().filter(|w| failing(w).is_some()).map(|w| h.word_string(w)).collect();
        let w = basis.iter().find_map(failing);
        Outcome::from_witness(
            w,
            format!("{} words up to degree {degree}", basis.len()),
            format!("antipode axiom fails on: {}", bad.join(", ")),
        )
    }));

    report.push(check(format!("{name}: coproduct multiplicative"), "hopf.coproduct-multiplicative", || {
        let mut pairs = Vec::new();
        for u in &basis {
            for v in &basis {
                if u.len() + v.len() <= degree {
                    pairs.push((u, v));
                }
            }
        }
        let n = pairs.len();
        let w = first_witness(pairs, |(u, v)| {
            let prod = &Element::from_word(a, u, R::one()) * &Element::from_word(a, v, R::one());
            let lhs = h.coproduct(&prod);
            let rhs = &*h.iterated_word(u, 1) * &*h.iterated_word(v, 1);
            (lhs != rhs).then(|| Witness::new(format!("{} * {}", h.word_string(u), h.word_string(v)), &lhs, &rhs))
        });
        Outcome::from_witness(w, format!("{n} pairs"), "D(uv) != D(u)D(v)")
    }));

    report.push(check(format!("{name}: inverse antipode"), "hopf.antipode-inverse", || {
        let Some(sinv) = h.antipode_inv_map() else {
            return Outcome::Vacuous("no inverse antipode declared".into());
        };
        if let Some(v) = sinv.relation_violations().into_iter().next() {
            return Outcome::Fail(Witness::new(v.subject, v.lhs, v.rhs), "inverse antipode violates a relation".into());
        }
        let w = first_witness(&basis, |w| {
            let e = Element::from_word(a, w, R::one());
            let s = h.antipode(&e);
            let back = sinv.map_element(&s);
            if back != e {
                return Some(Witness::new(format!("S^-1 S {}", h.word_string(w)), &back, &e));
            }
            let forth = h.antipode(&sinv.map_element(&e));
            (forth != e).then(|| Witness::new(format!("S S^-1 {}", h.word_string(w)), &forth, &e))
        });
        Outcome::from_witness(w, format!("{} words up to degree {degree}", basis.len()), "S^-1 is not inverse to S")
    }));

    report.push(check(format!("{name}: coproduct star-compatible"), "hopf.coproduct-star", || {
        if !a.has_star() {
            return Outcome::Vacuous("no star structure".into());
        }
        let w = first_witness(0..a.generators().len() as u16, |g| {
            let gs = a.star_of(g).expect("star");
            let lhs = h.generator_coproduct(gs).clone();
            let rhs = (0..2).fold(h.generator_coproduct(g).clone(), |t, k| {
                t.map_slot(k, a, |u| {
                    Element::from_word(a, u, R::one()).star().expect("star")
                })
            });
            (lhs != rhs).then(|| Witness::new(format!("D({})", a.word_string(&Word::letter(gs))), &lhs, &rhs))
        });
        Outcome::from_witness(w, "all generators", "coproduct does not commute with the involution")
    }));

    report
}
