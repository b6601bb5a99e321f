use std::sync::Arc;

use crate::error::{Error, Result};
use crate::memo::Memo;
use crate::scalar::Coeff;

use super::element::Element;
use super::presentation::Presentation;
use super::word::Word;

/// Mismatch found while certifying a map against the source relations.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub subject: String,
    pub lhs: String,
    pub rhs: String,
}

/// Algebra map (or antimultiplicative map) given by generator images.
///
/// A morphism is only usable through [`Morphism::apply`] once certified: the
/// images must satisfy every defining relation of the source, which is an
/// exact proof of well-definedness given normal forms in the target.
pub struct Morphism<R> {
    name: String,
    source: Arc<Presentation<R>>,
    target: Arc<Presentation<R>>,
    images: Vec<Element<R>>,
    antimultiplicative: bool,
    certified: bool,
    cache: Memo<Word, Element<R>>,
}

impl<R: Coeff> std::fmt::Debug for Morphism<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Morphism")
            .field("name", &self.name)
            .field("source", &self.source.name())
            .field("target", &self.target.name())
            .field("images", &self.images)
            .field("certified", &self.certified)
            .finish()
    }
}

impl<R: Coeff> Morphism<R> {
    /// Builds an uncertified morphism. Every source generator needs an image.
    pub fn new(
        name: &str,
        source: &Arc<Presentation<R>>,
        target: &Arc<Presentation<R>>,
        images: Vec<(&str, Element<R>)>,
        antimultiplicative: bool,
    ) -> Result<Self> {
        let mut slots: Vec<Option<Element<R>>> = vec![None; source.generators().len()];
        for (g, img) in images {
            let i = source.generator(g).ok_or_else(|| Error::UnknownGenerator(g.to_string()))?;
            if !Arc::ptr_eq(img.presentation(), target) {
                return Err(Error::PresentationMismatch {
                    left: target.name().to_string(),
                    right: img.presentation().name().to_string(),
                });
            }
            slots[i as usize] = Some(img);
        }
        let mut out = Vec::with_capacity(slots.len());
        for (i, s) in slots.into_iter().enumerate() {
            out.push(s.ok_or_else(|| Error::InvalidPresentation {
                name: name.to_string(),
                reason: format!("no image for generator `{}`", source.generator_name(i as u16)),
            })?);
        }
        Ok(Morphism {
            name: name.to_string(),
            source: source.clone(),
            target: target.clone(),
            images: out,
            antimultiplicative,
            certified: false,
            cache: Memo::new(),
        })
    }

    pub fn identity(p: &Arc<Presentation<R>>) -> Self {
        let images = (0..p.generators().len() as u16)
            .map(|g| Element::from_word(p, &Word::letter(g), R::one()))
            .collect();
        Morphism {
            name: format!("id_{}", p.name()),
            source: p.clone(),
            target: p.clone(),
            images,
            antimultiplicative: false,
            certified: true,
            cache: Memo::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<Presentation<R>> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Presentation<R>> {
        &self.target
    }

    pub fn images(&self) -> &[Element<R>] {
        &self.images
    }

    pub fn is_antimultiplicative(&self) -> bool {
        self.antimultiplicative
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Relations of the source whose images disagree in the target.
    pub fn relation_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for rule in self.source.rules() {
            let lhs = self.map_word(&rule.lhs);
            let mut rhs = Element::zero(&self.target);
            for (w, c) in &rule.rhs {
                rhs = &rhs + &self.map_word(w).scale(c);
            }
            if lhs != rhs {
                let relation = format!(
                    "{} = {}",
                    self.source.word_string(&rule.lhs),
                    Element::from_normal_terms(&self.source, rule.rhs.iter().cloned().collect())
                );
                out.push(Violation { subject: relation, lhs: lhs.to_string(), rhs: rhs.to_string() });
            }
        }
        out
    }

    /// Generators `g` with `m(g*) != m(g)*`. Empty when either side lacks a
    /// star structure.
    pub fn star_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !self.source.has_star() || !self.target.has_star() {
            return out;
        }
        for g in 0..self.source.generators().len() as u16 {
            let gs = self.source.star_of(g).expect("star declared");
            let lhs = &self.images[gs as usize];
            let rhs = self.images[g as usize].star().expect("target has star");
            if *lhs != rhs {
                out.push(Violation {
                    subject: format!("{}*", self.source.generator_name(g)),
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                });
            }
        }
        out
    }

    pub fn certify(mut self) -> Result<Self> {
        if let Some(v) = self.relation_violations().into_iter().next() {
            return Err(Error::IllDefinedMorphism {
                name: self.name.clone(),
                relation: v.subject,
                lhs: v.lhs,
                rhs: v.rhs,
            });
        }
        self.certified = true;
        Ok(self)
    }

    /// Certifies in place; on failure the morphism stays uncertified and the
    /// first violated relation is returned.
    pub fn try_certify(&mut self) -> Option<Violation> {
        let v = self.relation_violations().into_iter().next();
        self.certified = v.is_none();
        v
    }

    pub fn apply(&self, a: &Element<R>) -> Result<Element<R>> {
        if !self.certified {
            return Err(Error::UncertifiedMorphism(self.name.clone()));
        }
        if !Arc::ptr_eq(a.presentation(), &self.source) {
            return Err(Error::PresentationMismatch {
                left: self.source.name().to_string(),
                right: a.presentation().name().to_string(),
            });
        }
        Ok(self.map_element(a))
    }

    /// Linear extension without the certificate check.
    pub(crate) fn map_element(&self, a: &Element<R>) -> Element<R> {
        let mut out = Element::zero(&self.target);
        for (w, c) in a.terms() {
            out = &out + &self.map_word(w).scale(c);
        }
        out
    }

    pub(crate) fn map_word(&self, w: &Word) -> Element<R> {
        if w.is_empty() {
            return Element::one(&self.target);
        }
        if w.len() == 1 {
            return self.images[w.letters()[0] as usize].clone();
        }
        self.cache.get_or_insert_with(w, || {
            let n = w.len();
            let head = self.map_word(&w.subword(0, n - 1));
            let last = &self.images[w.letters()[n - 1] as usize];
            if self.antimultiplicative {
                last * &head
            } else {
                &head * last
            }
        })
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Morphism<R>, name: &str) -> Result<Morphism<R>> {
        if !Arc::ptr_eq(&self.target, &other.source) {
            return Err(Error::PresentationMismatch {
                left: self.target.name().to_string(),
                right: other.source.name().to_string(),
            });
        }
        Ok(Morphism {
            name: name.to_string(),
            source: self.source.clone(),
            target: other.target.clone(),
            images: self.images.iter().map(|e| other.map_element(e)).collect(),
            antimultiplicative: self.antimultiplicative != other.antimultiplicative,
            certified: self.certified && other.certified,
            cache: Memo::new(),
        })
    }

    /// The same morphism between coefficient-mapped presentations.
    pub fn map_coeffs<S: Coeff>(
        &self,
        source: &Arc<Presentation<S>>,
        target: &Arc<Presentation<S>>,
        f: &impl Fn(&R) -> S,
    ) -> Morphism<S> {
        Morphism {
            name: self.name.clone(),
            source: source.clone(),
            target: target.clone(),
            images: self.images.iter().map(|e| e.map_coeffs(target, f)).collect(),
            antimultiplicative: self.antimultiplicative,
            certified: false,
            cache: Memo::new(),
        }
    }
}
