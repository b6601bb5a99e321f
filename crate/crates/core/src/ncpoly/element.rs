use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Coeff;

use super::presentation::{add_into, Presentation};
use super::word::Word;

/// Element of a presented algebra, stored in normal form.
#[derive(Clone)]
pub struct Element<R> {
    pres: Arc<Presentation<R>>,
    terms: BTreeMap<Word, R>,
}

/// Prints `c w` in a form the presentation-file parser reads back.
pub(crate) fn write_term<R: Coeff>(out: &mut String, first: bool, c: &R, w: &str) {
    let neg = c.is_negative();
    let abs = if neg { -c.clone() } else { c.clone() };
    match (first, neg) {
        (true, true) => out.push('-'),
        (true, false) => {}
        (false, true) => out.push_str(" - "),
        (false, false) => out.push_str(" + "),
    }
    let coeff = abs.to_string();
    let compound = abs.is_compound();
    if abs.is_one() {
        out.push_str(w);
    } else if w == "1" {
        if compound {
            out.push_str(&format!("({coeff})"));
        } else {
            out.push_str(&coeff);
        }
    } else if compound {
        out.push_str(&format!("({coeff}) {w}"));
    } else {
        out.push_str(&format!("{coeff} {w}"));
    }
}

impl<R: Coeff> Element<R> {
    pub fn zero(p: &Arc<Presentation<R>>) -> Self {
        Element { pres: p.clone(), terms: BTreeMap::new() }
    }

    pub fn one(p: &Arc<Presentation<R>>) -> Self {
        Self::scalar(p, R::one())
    }

    pub fn scalar(p: &Arc<Presentation<R>>, c: R) -> Self {
        Self::from_word(p, &Word::empty(), c)
    }

    /// `c * w`, normalized.
    pub fn from_word(p: &Arc<Presentation<R>>, w: &Word, c: R) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            for (v, d) in p.nf(w).iter() {
                add_into(&mut terms, v.clone(), c.clone() * d.clone());
            }
        }
        Element { pres: p.clone(), terms }
    }

    pub fn generator(p: &Arc<Presentation<R>>, name: &str) -> Result<Self> {
        let g = p.generator(name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        Ok(Self::from_word(p, &Word::letter(g), R::one()))
    }

    /// Parses a space-separated word such as `"x y x*"`.
    pub fn word(p: &Arc<Presentation<R>>, text: &str) -> Result<Self> {
        let w = p.parse_word(text)?;
        Ok(Self::from_word(p, &w, R::one()))
    }

    /// Normalizes a raw sum of (not necessarily reduced) words.
    pub fn normalize(p: &Arc<Presentation<R>>, raw: &[(Word, R)]) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (w, c) in raw {
            if c.is_zero() {
                continue;
            }
            for (v, d) in p.normalize_word(w)?.iter() {
                add_into(&mut terms, v.clone(), c.clone() * d.clone());
            }
        }
        Ok(Element { pres: p.clone(), terms })
    }

    /// Wraps terms already known to be irreducible.
    pub(crate) fn from_normal_terms(p: &Arc<Presentation<R>>, terms: BTreeMap<Word, R>) -> Self {
        Element { pres: p.clone(), terms }
    }

    pub fn presentation(&self) -> &Arc<Presentation<R>> {
        &self.pres
    }

    pub fn terms(&self) -> &BTreeMap<Word, R> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Word, R> {
        self.terms
    }

    pub fn coefficient(&self, w: &Word) -> R {
        self.terms.get(w).cloned().unwrap_or_else(R::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest word length occurring, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    pub fn same_algebra(&self, other: &Element<R>) -> bool {
        Arc::ptr_eq(&self.pres, &other.pres)
    }

    fn check_same(&self, other: &Element<R>) -> Result<()> {
        if self.same_algebra(other) {
            Ok(())
        } else {
            Err(Error::PresentationMismatch {
                left: self.pres.name().to_string(),
                right: other.pres.name().to_string(),
            })
        }
    }

    pub fn try_add(&self, other: &Element<R>) -> Result<Self> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            add_into(&mut terms, w.clone(), c.clone());
        }
        Ok(Element { pres: self.pres.clone(), terms })
    }

    pub fn try_mul(&self, other: &Element<R>) -> Result<Self> {
        self.check_same(other)?;
        let mut terms = BTreeMap::new();
        for (u, c) in &self.terms {
            for (v, d) in &other.terms {
                let cd = c.clone() * d.clone();
                for (w, e) in self.pres.nf(&u.concat(v)).iter() {
                    add_into(&mut terms, w.clone(), cd.clone() * e.clone());
                }
            }
        }
        Ok(Element { pres: self.pres.clone(), terms })
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            for (w, d) in &self.terms {
                add_into(&mut terms, w.clone(), c.clone() * d.clone());
            }
        }
        Element { pres: self.pres.clone(), terms }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Element::one(&self.pres);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Antimultiplicative involution. Coefficients are treated as real (the
    /// deformation parameters are real), so the involution is linear.
    pub fn star(&self) -> Result<Self> {
        if !self.pres.has_star() {
            return Err(Error::InvalidPresentation {
                name: self.pres.name().to_string(),
                reason: "no star structure declared".into(),
            });
        }
        let raw: Vec<(Word, R)> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let letters = w
                    .letters()
                    .iter()
                    .rev()
                    .map(|g| self.pres.star_of(*g).expect("star declared"))
                    .collect();
                (Word::new(letters), c.clone())
            })
            .collect();
        Element::normalize(&self.pres, &raw)
    }

    /// Coefficients mapped into another ring over a presentation with the same
    /// generators and normal words.
    pub fn map_coeffs<S: Coeff>(&self, target: &Arc<Presentation<S>>, f: &impl Fn(&R) -> S) -> Element<S> {
        let raw: Vec<(Word, S)> = self.terms.iter().map(|(w, c)| (w.clone(), f(c))).collect();
        Element::normalize(target, &raw).expect("normal forms of mapped presentation")
    }
}

impl<R: Coeff> PartialEq for Element<R> {
    fn eq(&self, other: &Self) -> bool {
        self.same_algebra(other) && self.terms == other.terms
    }
}

impl<R: Coeff> fmt::Display for Element<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (k, (w, c)) in self.terms.iter().enumerate() {
            write_term(&mut out, k == 0, c, &self.pres.word_string(w));
        }
        f.write_str(&out)
    }
}

impl<R: Coeff> fmt::Debug for Element<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.pres.name(), self)
    }
}

impl<R: Coeff> Add for &Element<R> {
    type Output = Element<R>;
    fn add(self, rhs: &Element<R>) -> Element<R> {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<R: Coeff> Sub for &Element<R> {
    type Output = Element<R>;
    fn sub(self, rhs: &Element<R>) -> Element<R> {
        self.try_add(&-rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<R: Coeff> Neg for &Element<R> {
    type Output = Element<R>;
    fn neg(self) -> Element<R> {
        Element {
            pres: self.pres.clone(),
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c.clone())).collect(),
        }
    }
}

impl<R: Coeff> Mul for &Element<R> {
    type Output = Element<R>;
    fn mul(self, rhs: &Element<R>) -> Element<R> {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}
