use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ncpoly::{add_into, write_term, Element, Presentation, Word};
use crate::scalar::Coeff;

/// Finite sum of pure tensors `w_1 (x) ... (x) w_k` of normal words, one
/// slot per factor presentation. Multiplication is slot-wise.
#[derive(Clone)]
pub struct TensorElement<R> {
    slots: Vec<Arc<Presentation<R>>>,
    terms: BTreeMap<Vec<Word>, R>,
}

fn same_slots<R>(a: &[Arc<Presentation<R>>], b: &[Arc<Presentation<R>>]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| Arc::ptr_eq(x, y))
}

fn slot_names<R: Coeff>(s: &[Arc<Presentation<R>>]) -> String {
    s.iter().map(|p| p.name().to_string()).collect::<Vec<_>>().join(" (x) ")
}

impl<R: Coeff> TensorElement<R> {
    pub fn zero(slots: &[Arc<Presentation<R>>]) -> Self {
        TensorElement { slots: slots.to_vec(), terms: BTreeMap::new() }
    }

    pub fn one(slots: &[Arc<Presentation<R>>]) -> Self {
        Self::from_words(slots, vec![Word::empty(); slots.len()], R::one())
    }

    /// `c * w_1 (x) ... (x) w_k` with every `w_i` already normal.
    pub fn from_words(slots: &[Arc<Presentation<R>>], words: Vec<Word>, c: R) -> Self {
        let mut terms = BTreeMap::new();
        add_into(&mut terms, words, c);
        TensorElement { slots: slots.to_vec(), terms }
    }

    /// Scalar as a tensor with no slots.
    pub fn scalar(c: R) -> Self {
        Self::from_words(&[], Vec::new(), c)
    }

    /// `a_1 (x) ... (x) a_k`.
    pub fn pure(factors: &[&Element<R>]) -> Self {
        let slots: Vec<_> = factors.iter().map(|e| e.presentation().clone()).collect();
        let mut terms: BTreeMap<Vec<Word>, R> = BTreeMap::new();
        terms.insert(Vec::new(), R::one());
        for e in factors {
            let mut next = BTreeMap::new();
            for (ws, c) in &terms {
                for (w, d) in e.terms() {
                    let mut k = ws.clone();
                    k.push(w.clone());
                    add_into(&mut next, k, c.clone() * d.clone());
                }
            }
            terms = next;
        }
        TensorElement { slots, terms }
    }

    pub fn slots(&self) -> &[Arc<Presentation<R>>] {
        &self.slots
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Word>, R> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, words: &[Word]) -> R {
        self.terms.get(words).cloned().unwrap_or_else(R::zero)
    }

    /// Value of a slot-free tensor.
    pub fn as_scalar(&self) -> Option<R> {
        if self.slots.is_empty() {
            Some(self.coefficient(&[]))
        } else {
            None
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_slots(&self.slots, &other.slots) {
            Ok(())
        } else {
            Err(Error::PresentationMismatch { left: slot_names(&self.slots), right: slot_names(&other.slots) })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            add_into(&mut terms, w.clone(), c.clone());
        }
        Ok(TensorElement { slots: self.slots.clone(), terms })
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut terms = BTreeMap::new();
        for (w, d) in &self.terms {
            add_into(&mut terms, w.clone(), c.clone() * d.clone());
        }
        TensorElement { slots: self.slots.clone(), terms }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut terms = BTreeMap::new();
        for (u, c) in &self.terms {
            for (v, d) in &other.terms {
                let forms: Vec<_> =
                    (0..self.slots.len()).map(|k| self.slots[k].nf(&u[k].concat(&v[k]))).collect();
                expand_product(&forms, c.clone() * d.clone(), &mut terms);
            }
        }
        Ok(TensorElement { slots: self.slots.clone(), terms })
    }

    /// `self (x) other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut slots = self.slots.clone();
        slots.extend(other.slots.iter().cloned());
        let mut terms = BTreeMap::new();
        for (u, c) in &self.terms {
            for (v, d) in &other.terms {
                let mut k = u.clone();
                k.extend(v.iter().cloned());
                add_into(&mut terms, k, c.clone() * d.clone());
            }
        }
        TensorElement { slots, terms }
    }

    /// Replaces slot `k` by the slots of `f(word)`, linearly. Every value of
    /// `f` must live over `new_slots`.
    pub fn replace_slot(
        &self,
        k: usize,
        new_slots: &[Arc<Presentation<R>>],
        mut f: impl FnMut(&Word) -> TensorElement<R>,
    ) -> Self {
        let mut slots = self.slots[..k].to_vec();
        slots.extend(new_slots.iter().cloned());
        slots.extend(self.slots[k + 1..].iter().cloned());
        let mut terms = BTreeMap::new();
        let mut cache: BTreeMap<Word, TensorElement<R>> = BTreeMap::new();
        for (ws, c) in &self.terms {
            let img = cache.entry(ws[k].clone()).or_insert_with(|| f(&ws[k]));
            debug_assert!(same_slots(&img.slots, new_slots));
            for (vs, d) in &img.terms {
                let mut key = ws[..k].to_vec();
                key.extend(vs.iter().cloned());
                key.extend(ws[k + 1..].iter().cloned());
                add_into(&mut terms, key, c.clone() * d.clone());
            }
        }
        TensorElement { slots, terms }
    }

    /// Applies a linear map into a single algebra on slot `k`.
    pub fn map_slot(
        &self,
        k: usize,
        target: &Arc<Presentation<R>>,
        mut f: impl FnMut(&Word) -> Element<R>,
    ) -> Self {
        self.replace_slot(k, std::slice::from_ref(target), |w| {
            let e = f(w);
            TensorElement::pure(&[&e])
        })
    }

    /// Multiplies slots `k` and `k + 1`, which must share a presentation.
    pub fn multiply_slots(&self, k: usize) -> Result<Self> {
        self.merge_slots(k, false)
    }

    /// Like [`TensorElement::multiply_slots`] but with the factors swapped:
    /// slot `k + 1` times slot `k`.
    pub fn multiply_slots_opposite(&self, k: usize) -> Result<Self> {
        self.merge_slots(k, true)
    }

    fn merge_slots(&self, k: usize, opposite: bool) -> Result<Self> {
        if !Arc::ptr_eq(&self.slots[k], &self.slots[k + 1]) {
            return Err(Error::PresentationMismatch {
                left: self.slots[k].name().to_string(),
                right: self.slots[k + 1].name().to_string(),
            });
        }
        let p = &self.slots[k];
        let mut slots = self.slots.clone();
        slots.remove(k + 1);
        let mut terms = BTreeMap::new();
        for (ws, c) in &self.terms {
            let prod = if opposite { ws[k + 1].concat(&ws[k]) } else { ws[k].concat(&ws[k + 1]) };
            for (w, d) in p.nf(&prod).iter() {
                let mut key = ws.clone();
                key.remove(k + 1);
                key[k] = w.clone();
                add_into(&mut terms, key, c.clone() * d.clone());
            }
        }
        Ok(TensorElement { slots, terms })
    }

    /// The element of a one-slot tensor.
    pub fn into_element(self) -> Option<Element<R>> {
        if self.slots.len() != 1 {
            return None;
        }
        let p = self.slots[0].clone();
        let terms = self.terms.into_iter().map(|(mut ws, c)| (ws.pop().expect("one slot"), c)).collect();
        Some(Element::from_normal_terms(&p, terms))
    }

    pub fn map_coeffs<S: Coeff>(&self, slots: &[Arc<Presentation<S>>], f: &impl Fn(&R) -> S) -> TensorElement<S> {
        let mut out = TensorElement::zero(slots);
        for (ws, c) in &self.terms {
            let factors: Vec<Element<S>> = ws
                .iter()
                .zip(slots)
                .map(|(w, p)| Element::from_word(p, w, S::one()))
                .collect();
            let refs: Vec<&Element<S>> = factors.iter().collect();
            out = &out + &TensorElement::pure(&refs).scale(&f(c));
        }
        out
    }
}

fn expand_product<R: Coeff>(forms: &[crate::ncpoly::NormalForm<R>], c: R, out: &mut BTreeMap<Vec<Word>, R>) {
    fn go<R: Coeff>(
        forms: &[crate::ncpoly::NormalForm<R>],
        k: usize,
        key: &mut Vec<Word>,
        c: R,
        out: &mut BTreeMap<Vec<Word>, R>,
    ) {
        if k == forms.len() {
            add_into(out, key.clone(), c);
            return;
        }
        for (w, d) in forms[k].iter() {
            key.push(w.clone());
            go(forms, k + 1, key, c.clone() * d.clone(), out);
            key.pop();
        }
    }
    go(forms, 0, &mut Vec::with_capacity(forms.len()), c, out);
}

impl<R: Coeff> PartialEq for TensorElement<R> {
    fn eq(&self, other: &Self) -> bool {
        same_slots(&self.slots, &other.slots) && self.terms == other.terms
    }
}

impl<R: Coeff> fmt::Display for TensorElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (k, (ws, c)) in self.terms.iter().enumerate() {
            let text = if ws.is_empty() {
                "1".to_string()
            } else {
                ws.iter()
                    .zip(&self.slots)
                    .map(|(w, p)| p.word_string(w))
                    .collect::<Vec<_>>()
                    .join(" (x) ")
            };
            write_term(&mut out, k == 0, c, &text);
        }
        f.write_str(&out)
    }
}

impl<R: Coeff> fmt::Debug for TensorElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]({})", slot_names(&self.slots), self)
    }
}

impl<R: Coeff> Add for &TensorElement<R> {
    type Output = TensorElement<R>;
    fn add(self, rhs: &TensorElement<R>) -> TensorElement<R> {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<R: Coeff> Sub for &TensorElement<R> {
    type Output = TensorElement<R>;
    fn sub(self, rhs: &TensorElement<R>) -> TensorElement<R> {
        self.try_add(&-rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<R: Coeff> Neg for &TensorElement<R> {
    type Output = TensorElement<R>;
    fn neg(self) -> TensorElement<R> {
        self.scale(&-R::one())
    }
}

impl<R: Coeff> Mul for &TensorElement<R> {
    type Output = TensorElement<R>;
    fn mul(self, rhs: &TensorElement<R>) -> TensorElement<R> {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}
