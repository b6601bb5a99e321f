//! Locally trivial bundles: covers by charts `B_i (x) H`, chart changes
//! built from transition functions, the glued base algebra and the total
//! space with its coaction.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hopf::{conv_inverse_witness, HopfAlgebra, InverseSide, LinMap, TensorElement};
use crate::linalg::{self, Solution};
use crate::memo::Memo;
use crate::ncpoly::{Element, Morphism, Presentation, Word};
use crate::report::{check, first_witness, Outcome, Report, Witness, NOTE_CHART_CHANGE, NOTE_DEGREE};
use crate::scalar::Coeff;

#[derive(Clone, Debug)]
pub struct Chart<R> {
    pub label: String,
    pub algebra: Arc<Presentation<R>>,
}

/// Data attached to an ordered pair of charts `(i, j)`.
pub struct Overlap<R> {
    /// `B_ij`, shared with the pair `(j, i)`.
    pub algebra: Arc<Presentation<R>>,
    /// `pi^i_j : B_i -> B_ij`.
    pub restriction: Arc<Morphism<R>>,
    /// `tau_ij : H -> B_ij`.
    pub transition: LinMap<R>,
    /// The morphism `tau_ij` was declared as, if it was not derived from the
    /// opposite pair.
    pub declared: Option<Arc<Morphism<R>>>,
}

/// A finite cover glued along transition functions.
pub struct Bundle<R> {
    name: String,
    fibre: Arc<HopfAlgebra<R>>,
    charts: Vec<Chart<R>>,
    overlaps: BTreeMap<(usize, usize), Overlap<R>>,
    lifts: Memo<(usize, usize, Word), Option<Element<R>>>,
}

pub struct BundleBuilder<R> {
    name: String,
    fibre: Arc<HopfAlgebra<R>>,
    charts: Vec<Chart<R>>,
    overlaps: Vec<(String, String, Arc<Presentation<R>>)>,
    restrictions: Vec<(String, String, Arc<Morphism<R>>)>,
    transitions: Vec<(String, String, Arc<Morphism<R>>)>,
}

impl<R: Coeff> BundleBuilder<R> {
    pub fn new(name: &str, fibre: &Arc<HopfAlgebra<R>>) -> Self {
        BundleBuilder {
            name: name.to_string(),
            fibre: fibre.clone(),
            charts: Vec::new(),
            overlaps: Vec::new(),
            restrictions: Vec::new(),
            transitions: Vec::new(),
        }
    }

    pub fn chart(mut self, label: &str, algebra: &Arc<Presentation<R>>) -> Self {
        self.charts.push(Chart { label: label.to_string(), algebra: algebra.clone() });
        self
    }

    pub fn overlap(mut self, i: &str, j: &str, algebra: &Arc<Presentation<R>>) -> Self {
        self.overlaps.push((i.to_string(), j.to_string(), algebra.clone()));
        self
    }

    /// `pi^i_j`.
    pub fn restriction(mut self, i: &str, j: &str, m: &Arc<Morphism<R>>) -> Self {
        self.restrictions.push((i.to_string(), j.to_string(), m.clone()));
        self
    }

    /// `tau_ij`. The opposite transition defaults to `tau_ij o S`.
    pub fn transition(mut self, i: &str, j: &str, m: &Arc<Morphism<R>>) -> Self {
        self.transitions.push((i.to_string(), j.to_string(), m.clone()));
        self
    }

    pub fn build(self) -> Result<Arc<Bundle<R>>> {
        let invalid = |reason: String| Error::InvalidPresentation { name: self.name.clone(), reason };
        let index = |label: &str| -> Result<usize> {
            self.charts
                .iter()
                .position(|c| c.label == label)
                .ok_or_else(|| invalid(format!("unknown chart `{label}`")))
        };
        for (k, c) in self.charts.iter().enumerate() {
            if self.charts[..k].iter().any(|d| d.label == c.label) {
                return Err(invalid(format!("chart `{}` declared twice", c.label)));
            }
        }
        let h = self.fibre.algebra();
        let mut overlaps = BTreeMap::new();
        for (i, j, b) in &self.overlaps {
            let (i, j) = (index(i)?, index(j)?);
            if i == j {
                return Err(invalid("overlap of a chart with itself".into()));
            }
            for (a, c) in [(i, j), (j, i)] {
                let label = format!("{}{}", self.charts[a].label, self.charts[c].label);
                let restriction = self
                    .restrictions
                    .iter()
                    .find(|(x, y, _)| *x == self.charts[a].label && *y == self.charts[c].label)
                    .map(|r| r.2.clone())
                    .ok_or_else(|| invalid(format!("no restriction for overlap {label}")))?;
                if !Arc::ptr_eq(restriction.source(), &self.charts[a].algebra)
                    || !Arc::ptr_eq(restriction.target(), b)
                {
                    return Err(invalid(format!("restriction `{}` has the wrong source or target", restriction.name())));
                }
                let declared = self
                    .transitions
                    .iter()
                    .find(|(x, y, _)| *x == self.charts[a].label && *y == self.charts[c].label)
                    .map(|t| t.2.clone());
                if let Some(m) = &declared {
                    if !Arc::ptr_eq(m.source(), h) || !Arc::ptr_eq(m.target(), b) {
                        return Err(invalid(format!("transition `{}` is not a map {} -> {}", m.name(), h.name(), b.name())));
                    }
                }
                overlaps.insert((a, c), (b.clone(), restriction, declared));
            }
        }
        let mut out = BTreeMap::new();
        let keys: Vec<_> = overlaps.keys().copied().collect();
        for (i, j) in keys {
            let (b, restriction, declared) = overlaps[&(i, j)].clone();
            let transition = match &declared {
                Some(m) => LinMap::hom_unchecked(&self.fibre, m),
                None => {
                    let opposite = overlaps[&(j, i)].2.clone().ok_or_else(|| {
                        invalid(format!("no transition for overlap {}{}", self.charts[i].label, self.charts[j].label))
                    })?;
                    LinMap::hom_unchecked(&self.fibre, &opposite).precompose(crate::hopf::Antipode::S)?
                }
            };
            out.insert((i, j), Overlap { algebra: b, restriction, transition, declared });
        }
        Ok(Arc::new(Bundle {
            name: self.name,
            fibre: self.fibre,
            charts: self.charts,
            overlaps: out,
            lifts: Memo::new(),
        }))
    }
}

/// Element of the total space: one local element of `B_i (x) H` per chart.
#[derive(Clone)]
pub struct TotalElement<R> {
    pub locals: Vec<TensorElement<R>>,
}

impl<R: Coeff> PartialEq for TotalElement<R> {
    fn eq(&self, other: &Self) -> bool {
        self.locals == other.locals
    }
}

impl<R: Coeff> TotalElement<R> {
    pub fn is_zero(&self) -> bool {
        self.locals.iter().all(TensorElement::is_zero)
    }

    pub fn scale(&self, c: &R) -> Self {
        TotalElement { locals: self.locals.iter().map(|t| t.scale(c)).collect() }
    }
}

impl<R: Coeff> std::ops::Add for &TotalElement<R> {
    type Output = TotalElement<R>;
    fn add(self, rhs: &TotalElement<R>) -> TotalElement<R> {
        TotalElement { locals: self.locals.iter().zip(&rhs.locals).map(|(a, b)| a + b).collect() }
    }
}

impl<R: Coeff> std::ops::Sub for &TotalElement<R> {
    type Output = TotalElement<R>;
    fn sub(self, rhs: &TotalElement<R>) -> TotalElement<R> {
        TotalElement { locals: self.locals.iter().zip(&rhs.locals).map(|(a, b)| a - b).collect() }
    }
}

impl<R: Coeff> std::ops::Mul for &TotalElement<R> {
    type Output = TotalElement<R>;
    fn mul(self, rhs: &TotalElement<R>) -> TotalElement<R> {
        TotalElement { locals: self.locals.iter().zip(&rhs.locals).map(|(a, b)| a * b).collect() }
    }
}

impl<R: Coeff> fmt::Display for TotalElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.locals.iter().map(|t| t.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl<R: Coeff> fmt::Debug for TotalElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Element of the glued base algebra: one chart element per chart, agreeing
/// on overlaps.
#[derive(Clone)]
pub struct BaseElement<R> {
    pub parts: Vec<Element<R>>,
}

impl<R: Coeff> PartialEq for BaseElement<R> {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts
    }
}

impl<R: Coeff> std::ops::Mul for &BaseElement<R> {
    type Output = BaseElement<R>;
    fn mul(self, rhs: &BaseElement<R>) -> BaseElement<R> {
        BaseElement { parts: self.parts.iter().zip(&rhs.parts).map(|(a, b)| a * b).collect() }
    }
}

impl<R: Coeff> fmt::Display for BaseElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|t| t.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl<R: Coeff> fmt::Debug for BaseElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Total-space element from the degree-bounded spanning set, with the
/// degree it was enumerated at.
#[derive(Clone, Debug)]
pub struct Sample<T> {
    pub element: T,
    pub degree: usize,
}

impl<R: Coeff> Bundle<R> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn fibre(&self) -> &Arc<HopfAlgebra<R>> {
        &self.fibre
    }

    pub fn charts(&self) -> &[Chart<R>] {
        &self.charts
    }

    pub fn chart_index(&self, label: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.label == label)
    }

    pub fn overlap(&self, i: usize, j: usize) -> Option<&Overlap<R>> {
        self.overlaps.get(&(i, j))
    }

    /// Ordered pairs `(i, j)` with `i < j` that overlap.
    pub fn overlap_pairs(&self) -> Vec<(usize, usize)> {
        self.overlaps.keys().copied().filter(|(i, j)| i < j).collect()
    }

    pub fn pair_label(&self, i: usize, j: usize) -> String {
        format!("{}{}", self.charts[i].label, self.charts[j].label)
    }

    /// Slots `B_i (x) H` of chart `i`.
    pub fn local_slots(&self, i: usize) -> Vec<Arc<Presentation<R>>> {
        vec![self.charts[i].algebra.clone(), self.fibre.algebra().clone()]
    }

    fn overlap_ref(&self, i: usize, j: usize) -> Result<&Overlap<R>> {
        self.overlaps
            .get(&(i, j))
            .ok_or_else(|| Error::Transition(format!("charts {} and {} do not overlap", self.charts[i].label, self.charts[j].label)))
    }

    fn certified(&self, i: usize, j: usize) -> Result<&Overlap<R>> {
        let o = self.overlap_ref(i, j)?;
        for (a, b) in [(i, j), (j, i)] {
            if let Some(m) = &self.overlap_ref(a, b)?.declared {
                if !m.is_certified() {
                    return Err(Error::Transition(format!(
                        "transition `{}` lacks a consistency certificate",
                        m.name()
                    )));
                }
            }
        }
        Ok(o)
    }

    /// Applies `b (x) h (x) rest -> sum b t(h_1) (x) h_2 (x) rest` on a tensor
    /// whose first two slots are `B_ij (x) H`.
    fn twist(&self, t: &TensorElement<R>, tau: &LinMap<R>) -> TensorElement<R> {
        act_on_chart(&self.fibre, t, tau, false)
    }

    /// Chart change `phi_ij(b (x) h) = sum b tau_ij(h_1) (x) h_2` on `B_ij (x) H`
    /// (further slots are carried along).
    pub fn phi(&self, i: usize, j: usize, t: &TensorElement<R>) -> Result<TensorElement<R>> {
        let o = self.certified(i, j)?;
        Ok(self.twist(t, &o.transition))
    }

    /// `(pi^i_j (x) id)` on a tensor whose first slot is `B_i`.
    pub fn restrict(&self, i: usize, j: usize, t: &TensorElement<R>) -> Result<TensorElement<R>> {
        let o = self.overlap_ref(i, j)?;
        Ok(t.map_slot(0, &o.algebra, |w| o.restriction.map_word(w)))
    }

    /// First overlap where `(pi^i_j (x) id) f_i != phi_ij((pi^j_i (x) id) f_j)`.
    pub fn gluing_witness(&self, locals: &[TensorElement<R>]) -> Result<Option<Witness>> {
        for (i, j) in self.overlap_pairs() {
            let lhs = self.restrict(i, j, &locals[i])?;
            let rhs = self.phi(i, j, &self.restrict(j, i, &locals[j])?)?;
            if lhs != rhs {
                return Ok(Some(Witness::new(format!("overlap {}", self.pair_label(i, j)), lhs, rhs)));
            }
        }
        Ok(None)
    }

    /// Validates chart-local data as an element of the total space.
    pub fn glue(&self, locals: Vec<TensorElement<R>>) -> Result<TotalElement<R>> {
        if locals.len() != self.charts.len() {
            return Err(Error::Gluing {
                overlap: "all".into(),
                lhs: format!("{} charts", self.charts.len()),
                rhs: format!("{} locals", locals.len()),
            });
        }
        for (i, t) in locals.iter().enumerate() {
            let want = self.local_slots(i);
            if t.slots().len() != 2 || !t.slots().iter().zip(&want).all(|(a, b)| Arc::ptr_eq(a, b)) {
                return Err(Error::PresentationMismatch {
                    left: format!("{} (x) {}", want[0].name(), want[1].name()),
                    right: format!("{t:?}"),
                });
            }
        }
        if let Some(w) = self.gluing_witness(&locals)? {
            return Err(Error::Gluing { overlap: w.subject.trim_start_matches("overlap ").to_string(), lhs: w.lhs, rhs: w.rhs });
        }
        Ok(TotalElement { locals })
    }

    pub fn total_one(&self) -> TotalElement<R> {
        TotalElement { locals: (0..self.charts.len()).map(|i| TensorElement::one(&self.local_slots(i))).collect() }
    }

    pub fn total_zero(&self) -> TotalElement<R> {
        TotalElement { locals: (0..self.charts.len()).map(|i| TensorElement::zero(&self.local_slots(i))).collect() }
    }

    pub fn base_element(&self, parts: Vec<Element<R>>) -> Result<BaseElement<R>> {
        if parts.len() != self.charts.len() {
            return Err(Error::InvalidBaseElement(format!("expected {} parts", self.charts.len())));
        }
        for (k, p) in parts.iter().enumerate() {
            if !Arc::ptr_eq(p.presentation(), &self.charts[k].algebra) {
                return Err(Error::InvalidBaseElement(format!("part {k} is not in {}", self.charts[k].algebra.name())));
            }
        }
        for (i, j) in self.overlap_pairs() {
            let a = self.overlaps[&(i, j)].restriction.map_element(&parts[i]);
            let b = self.overlaps[&(j, i)].restriction.map_element(&parts[j]);
            if a != b {
                return Err(Error::InvalidBaseElement(format!(
                    "restrictions to overlap {} differ: {a} != {b}",
                    self.pair_label(i, j)
                )));
            }
        }
        Ok(BaseElement { parts })
    }

    /// `iota(b)` with locals `b_i (x) 1`.
    pub fn embed(&self, b: &BaseElement<R>) -> TotalElement<R> {
        let one = Element::one(self.fibre.algebra());
        TotalElement { locals: b.parts.iter().map(|p| TensorElement::pure(&[p, &one])).collect() }
    }

    /// Chart-wise `(id (x) D)`: three-slot locals `B_i (x) H (x) H`.
    pub fn coaction(&self, f: &TotalElement<R>) -> Vec<TensorElement<R>> {
        let h = self.fibre.algebra();
        f.locals
            .iter()
            .map(|t| t.replace_slot(1, &[h.clone(), h.clone()], |w| (*self.fibre.iterated_word(w, 1)).clone()))
            .collect()
    }

    fn two_charts(&self) -> Result<(usize, usize)> {
        match self.overlap_pairs().as_slice() {
            [(i, j)] if self.charts.len() == 2 => Ok((*i, *j)),
            _ => Err(Error::Unsupported("spanning sets are implemented for two-chart covers".into())),
        }
    }

    /// Preimage of a normal word of `B_ij` under `pi^i_j`.
    fn lift(&self, i: usize, j: usize, u: &Word) -> Option<Element<R>> {
        let key = (i, j, u.clone());
        if let Some(v) = self.lifts.get(&key) {
            return v;
        }
        let o = &self.overlaps[&(i, j)];
        let bi = &self.charts[i].algebra;
        let cols = bi.normal_words(u.len() + 1);
        let images: Vec<Element<R>> = cols.iter().map(|w| o.restriction.map_word(w)).collect();
        let mut rows: Vec<Word> = images.iter().flat_map(|e| e.terms().keys().cloned()).collect();
        rows.push(u.clone());
        rows.sort();
        rows.dedup();
        let matrix: Vec<Vec<R>> = rows.iter().map(|r| images.iter().map(|e| e.coefficient(r)).collect()).collect();
        let rhs: Vec<R> = rows.iter().map(|r| if r == u { R::one() } else { R::zero() }).collect();
        let v = match linalg::solve(matrix, rhs, cols.len()) {
            Solution::Found(x) => {
                let raw: Vec<(Word, R)> = cols.into_iter().zip(x).collect();
                Some(Element::normalize(bi, &raw).expect("normal words"))
            }
            _ => None,
        };
        self.lifts.insert(key, v.clone());
        v
    }

    /// Basis of `ker pi^i_j` among chart elements of degree `<= degree`.
    fn restriction_kernel(&self, i: usize, j: usize, degree: usize) -> Result<Vec<Sample<Element<R>>>> {
        let o = &self.overlaps[&(i, j)];
        let bi = &self.charts[i].algebra;
        let cols = bi.normal_words(degree);
        let images: Vec<Element<R>> = cols.iter().map(|w| o.restriction.map_word(w)).collect();
        let mut rows: Vec<Word> = images.iter().flat_map(|e| e.terms().keys().cloned()).collect();
        rows.sort();
        rows.dedup();
        let matrix: Vec<Vec<R>> = rows.iter().map(|r| images.iter().map(|e| e.coefficient(r)).collect()).collect();
        let kernel = linalg::nullspace(matrix, cols.len())
            .ok_or_else(|| Error::Unsupported("restriction kernel needs non-unit pivots".into()))?;
        Ok(kernel
            .into_iter()
            .map(|v| {
                let raw: Vec<(Word, R)> = cols.iter().cloned().zip(v).collect();
                let e = Element::normalize(bi, &raw).expect("normal words");
                let degree = e.degree().unwrap_or(0);
                Sample { element: e, degree }
            })
            .collect())
    }

    /// Lift of chart-`j` data `b (x) w` to a total-space element.
    fn lift_local(&self, i: usize, j: usize, local_j: &TensorElement<R>) -> Result<TotalElement<R>> {
        let target = self.phi(i, j, &self.restrict(j, i, local_j)?)?;
        let mut local_i = TensorElement::zero(&self.local_slots(i));
        let h = self.fibre.algebra();
        for (ws, c) in target.terms() {
            let pre = self.lift(i, j, &ws[0]).ok_or_else(|| {
                Error::Unsupported(format!(
                    "no preimage of `{}` under the restriction to overlap {}",
                    self.overlaps[&(i, j)].algebra.word_string(&ws[0]),
                    self.pair_label(i, j)
                ))
            })?;
            let fib = Element::from_word(h, &ws[1], R::one());
            local_i = &local_i + &TensorElement::pure(&[&pre, &fib]).scale(c);
        }
        let mut locals = vec![TensorElement::zero(&self.local_slots(i)); 2];
        locals[i] = local_i;
        locals[j] = local_j.clone();
        Ok(TotalElement { locals })
    }

    /// Degree-bounded spanning set of the total space for a two-chart cover:
    /// lifts of every chart-2 monomial `b (x) w` together with
    /// `k (x) w` for `k` in the kernel of the chart-1 restriction. Ordered
    /// by degree, kernel elements first, then graded-lexicographically.
    pub fn total_basis(&self, degree: usize) -> Result<Vec<Sample<TotalElement<R>>>> {
        let (i, j) = self.two_charts()?;
        let h = self.fibre.algebra();
        let hw = h.normal_words(degree);
        let bj = &self.charts[j].algebra;
        let bjw = bj.normal_words(degree);
        let kernel = self.restriction_kernel(i, j, degree)?;
        let mut out = Vec::new();
        for d in 0..=degree {
            for k in &kernel {
                for w in hw.iter().filter(|w| k.degree + w.len() == d) {
                    let fib = Element::from_word(h, w, R::one());
                    let mut locals = vec![TensorElement::zero(&self.local_slots(i)); 2];
                    locals[i] = TensorElement::pure(&[&k.element, &fib]);
                    locals[j] = TensorElement::zero(&self.local_slots(j));
                    out.push(Sample { element: TotalElement { locals }, degree: d });
                }
            }
            for b in &bjw {
                for w in hw.iter().filter(|w| b.len() + w.len() == d) {
                    let local = TensorElement::from_words(&self.local_slots(j), vec![b.clone(), w.clone()], R::one());
                    out.push(Sample { element: self.lift_local(i, j, &local)?, degree: d });
                }
            }
        }
        Ok(out)
    }

    /// Degree-bounded spanning set of the glued base algebra, ordered like
    /// [`Bundle::total_basis`].
    pub fn base_basis(&self, degree: usize) -> Result<Vec<Sample<BaseElement<R>>>> {
        let (i, j) = self.two_charts()?;
        let kernel = self.restriction_kernel(i, j, degree)?;
        let bj = &self.charts[j].algebra;
        let mut out = Vec::new();
        for d in 0..=degree {
            for k in kernel.iter().filter(|k| k.degree == d) {
                let mut parts = vec![Element::zero(&self.charts[i].algebra), Element::zero(&self.charts[j].algebra)];
                parts[i] = k.element.clone();
                out.push(Sample { element: BaseElement { parts }, degree: d });
            }
            for b in bj.normal_words(degree).iter().filter(|b| b.len() == d) {
                let part_j = Element::from_word(bj, b, R::one());
                let image = self.overlaps[&(j, i)].restriction.map_word(b);
                let mut part_i = Element::zero(&self.charts[i].algebra);
                for (u, c) in image.terms() {
                    let pre = self.lift(i, j, u).ok_or_else(|| {
                        Error::Unsupported(format!("no preimage under the restriction to overlap {}", self.pair_label(i, j)))
                    })?;
                    part_i = &part_i + &pre.scale(c);
                }
                let mut parts = vec![part_i.clone(), part_j.clone()];
                parts[i] = part_i;
                parts[j] = part_j;
                out.push(Sample { element: BaseElement { parts }, degree: d });
            }
        }
        Ok(out)
    }
}

/// `b (x) h (x) rest -> sum b t(h_1) (x) h_2 (x) rest`, or with `t(h_1) b`
/// when `opposite`. The first slot must be the target of `t`.
pub(crate) fn act_on_chart<R: Coeff>(
    fibre: &HopfAlgebra<R>,
    t: &TensorElement<R>,
    tau: &LinMap<R>,
    opposite: bool,
) -> TensorElement<R> {
    let h = fibre.algebra();
    let expanded = t.replace_slot(1, &[h.clone(), h.clone()], |w| (*fibre.iterated_word(w, 1)).clone());
    let mapped = expanded.map_slot(1, tau.target(), |w| tau.eval_word(w));
    if opposite {
        mapped.multiply_slots_opposite(0).expect("same chart algebra")
    } else {
        mapped.multiply_slots(0).expect("same chart algebra")
    }
}

fn morphism_record<R: Coeff>(report: &mut Report, m: &Morphism<R>, what: &str) {
    report.push(check(format!("{what} `{}` well defined", m.name()), "morphism.well-defined", || {
        let v = m.relation_violations().into_iter().next();
        Outcome::from_witness(
            v.map(|v| Witness::new(v.subject, v.lhs, v.rhs)),
            format!("{} relations of {}", m.source().rules().len(), m.source().name()),
            "images violate a relation",
        )
    }));
    report.push(check(format!("{what} `{}` star-compatible", m.name()), "morphism.star", || {
        if !m.source().has_star() || !m.target().has_star() {
            return Outcome::Vacuous("no star structure".into());
        }
        let v = m.star_violations().into_iter().next();
        Outcome::from_witness(v.map(|v| Witness::new(v.subject, v.lhs, v.rhs)), "all generators", "m(g*) != m(g)*")
    }));
}

/// Admissibility of the transition functions up to `degree`: well-defined
/// algebra maps, central images, `tau_ji = tau_ij o S`, unitality,
/// mutual convolution inverses and `phi_ij o phi_ji = id`.
pub fn check_transition_consistency<R: Coeff>(bundle: &Bundle<R>, degree: usize) -> Report {
    let mut report = Report::new();
    report.note(NOTE_CHART_CHANGE);
    report.note(NOTE_DEGREE);
    let fibre = bundle.fibre();
    let hw = fibre.basis(degree);
    for (i, j) in bundle.overlap_pairs() {
        let label = bundle.pair_label(i, j);
        let rlabel = bundle.pair_label(j, i);
        let (oij, oji) = (bundle.overlap(i, j).unwrap(), bundle.overlap(j, i).unwrap());
        for o in [oij, oji] {
            if let Some(m) = &o.declared {
                morphism_record(&mut report, m, "transition");
            }
        }
        let certified = bundle.certified(i, j).is_ok();
        let b = &oij.algebra;
        let gens: Vec<Element<R>> = (0..b.generators().len() as u16)
            .map(|g| Element::from_word(b, &Word::letter(g), R::one()))
            .collect();
        for (o, l) in [(oij, &label), (oji, &rlabel)] {
            report.push(check(format!("tau_{l} central"), "transition.central", || {
                let w = first_witness(&hw, |w| {
                    let v = o.transition.eval_word(w);
                    gens.iter().find_map(|g| {
                        let (lhs, rhs) = (&v * g, g * &v);
                        (lhs != rhs).then(|| {
                            Witness::new(format!("tau_{l}({}) against {g}", fibre.word_string(w)), lhs, rhs)
                        })
                    })
                });
                Outcome::from_witness(w, format!("{} words up to degree {degree}", hw.len()), "image not central")
            }));
            report.push(check(format!("tau_{l} unital"), "transition.unital", || {
                let v = o.transition.unit_value();
                let one = Element::one(b);
                Outcome::from_witness((v != one).then(|| Witness::new("1", &v, &one)), "tau(1) = 1", "tau(1) != 1")
            }));
        }
        for ((a, c), (x, y)) in [((oij, oji), (&label, &rlabel)), ((oji, oij), (&rlabel, &label))] {
            report.push(check(format!("tau_{y} = tau_{x} o S"), "transition.antipode", || {
                let s = a.transition.precompose(crate::hopf::Antipode::S).expect("antipode");
                let w = first_witness(0..fibre.algebra().generators().len() as u16, |g| {
                    let w = Word::letter(g);
                    let (lhs, rhs) = (c.transition.eval_word(&w), s.eval_word(&w));
                    (lhs != rhs).then(|| Witness::new(fibre.word_string(&w), lhs, rhs))
                });
                Outcome::from_witness(w, "all generators", "opposite transition is not tau o S")
            }));
        }
        report.push(check(format!("tau_{label} and tau_{rlabel} convolution inverse"), "transition.inverse", || {
            match conv_inverse_witness(&oij.transition, &oji.transition, degree, InverseSide::Both, false) {
                Ok(w) => Outcome::from_witness(w, format!("words up to degree {degree}"), "not convolution inverse"),
                Err(e) => Outcome::Fail(Witness::new(&label, "", ""), e.to_string()),
            }
        }));
        report.push(check(format!("phi_{label} o phi_{rlabel} = id"), "chart-change.inverse", || {
            if !certified {
                return Outcome::Fail(Witness::new(&label, "", ""), "transition data lacks a consistency certificate".into());
            }
            let slots = [b.clone(), fibre.algebra().clone()];
            let bw = b.normal_words(degree);
            let mut pairs = Vec::new();
            for u in &bw {
                for v in hw.iter().filter(|v| u.len() + v.len() <= degree) {
                    pairs.push((u.clone(), v.clone()));
                }
            }
            let n = pairs.len();
            let w = first_witness(pairs, |(u, v)| {
                let t = TensorElement::from_words(&slots, vec![u.clone(), v.clone()], R::one());
                for (x, y) in [(i, j), (j, i)] {
                    let back = bundle.phi(x, y, &bundle.phi(y, x, &t).ok()?).ok()?;
                    if back != t {
                        return Some(Witness::new(format!("phi_{} phi_{} on {t}", bundle.pair_label(x, y), bundle.pair_label(y, x)), back, &t));
                    }
                }
                None
            });
            Outcome::from_witness(w, format!("{n} monomials"), "chart changes are not inverse")
        }));
    }
    report
}

/// Structural checks of a bundle up to `degree`: restrictions, transition
/// data, gluing of the spanning set, closure under products, coaction
/// properties and the base embedding.
pub fn check_bundle<R: Coeff>(bundle: &Bundle<R>, degree: usize) -> Report {
    let mut report = Report::new();
    let name = bundle.name();
    for (i, j) in bundle.overlap_pairs() {
        for (a, c) in [(i, j), (j, i)] {
            let o = bundle.overlap(a, c).unwrap();
            morphism_record(&mut report, &o.restriction, "restriction");
            report.push(check(format!("pi^{}_{} surjective on generators", bundle.charts[a].label, bundle.charts[c].label), "restriction.surjective", || {
                let b = &o.algebra;
                let w = first_witness(0..b.generators().len() as u16, |g| {
                    bundle.lift(a, c, &Word::letter(g)).is_none().then(|| Witness::new(b.generator_name(g), "no preimage", ""))
                });
                Outcome::from_witness(w, "all generators have preimages", "restriction not surjective")
            }));
        }
    }
    report.extend(check_transition_consistency(bundle, degree));

    let basis = match bundle.total_basis(degree) {
        Ok(b) => b,
        Err(e) => {
            report.push(check(format!("{name}: total-space spanning set"), "bundle.spanning-set", || {
                Outcome::Fail(Witness::new(name, "", ""), e.to_string())
            }));
            return report;
        }
    };
    report.push(check(format!("{name}: spanning set glues"), "bundle.gluing", || {
        let w = first_witness(&basis, |s| bundle.gluing_witness(&s.element.locals).unwrap_or_else(|e| Some(Witness::new(&s.element, e, ""))));
        Outcome::from_witness(w, format!("{} elements up to degree {degree}", basis.len()), "gluing fails")
    }));
    report.push(check(format!("{name}: products glue"), "bundle.algebra", || {
        let mut n = 0;
        let w = first_witness(basis.iter().flat_map(|f| basis.iter().map(move |g| (f, g))), |(f, g)| {
            if f.degree + g.degree > degree {
                return None;
            }
            n += 1;
            let p = &f.element * &g.element;
            bundle
                .gluing_witness(&p.locals)
                .unwrap_or_else(|e| Some(Witness::new(&p, e, "")))
                .map(|w| Witness::new(format!("{} * {}: {}", f.element, g.element, w.subject), w.lhs, w.rhs))
        });
        Outcome::from_witness(w, format!("{n} pairs"), "product leaves the total space")
    }));
    report.push(check(format!("{name}: coaction"), "bundle.coaction", || {
        let h = bundle.fibre().algebra();
        let w = first_witness(&basis, |s| {
            let f = &s.element;
            let d = bundle.coaction(f);
            // first leg glues
            for (i, j) in bundle.overlap_pairs() {
                let lhs = bundle.restrict(i, j, &d[i]).ok()?;
                let rhs = bundle.phi(i, j, &bundle.restrict(j, i, &d[j]).ok()?).ok()?;
                if lhs != rhs {
                    return Some(Witness::new(format!("coaction of {f} on overlap {}", bundle.pair_label(i, j)), lhs, rhs));
                }
            }
            for (k, t) in d.iter().enumerate() {
                let counit = t.replace_slot(2, &[], |w| TensorElement::scalar(bundle.fibre().counit_word(w)));
                if counit != f.locals[k] {
                    return Some(Witness::new(format!("(id (x) e) coaction of {f}"), counit, &f.locals[k]));
                }
                let two = [h.clone(), h.clone()];
                let left = t.replace_slot(1, &two, |w| (*bundle.fibre().iterated_word(w, 1)).clone());
                let right = t.replace_slot(2, &two, |w| (*bundle.fibre().iterated_word(w, 1)).clone());
                if left != right {
                    return Some(Witness::new(format!("coassociativity of coaction on {f}"), left, right));
                }
            }
            None
        });
        Outcome::from_witness(w, format!("{} elements", basis.len()), "coaction property fails")
    }));
    match bundle.base_basis(degree) {
        Ok(base) => report.push(check(format!("{name}: base embedding"), "bundle.base-embedding", || {
            let one = Element::one(bundle.fibre().algebra());
            let w = first_witness(base.iter().flat_map(|a| base.iter().map(move |b| (a, b))), |(a, b)| {
                if a.degree + b.degree > degree {
                    return None;
                }
                let ab = &a.element * &b.element;
                if let Err(e) = bundle.base_element(ab.parts.clone()) {
                    return Some(Witness::new(format!("{} * {}", a.element, b.element), e, ""));
                }
                let lhs = bundle.embed(&ab);
                let rhs = &bundle.embed(&a.element) * &bundle.embed(&b.element);
                if lhs != rhs {
                    return Some(Witness::new(format!("iota({} * {})", a.element, b.element), lhs, rhs));
                }
                let d = bundle.coaction(&lhs);
                let expect: Vec<_> = lhs.locals.iter().map(|t| t.tensor(&TensorElement::pure(&[&one]))).collect();
                (d != expect).then(|| Witness::new(format!("coaction of iota({ab})"), format!("{d:?}"), format!("{expect:?}")))
            });
            Outcome::from_witness(w, format!("{} base elements", base.len()), "iota is not an algebra map into coinvariants")
        })),
        Err(e) => report.push(check(format!("{name}: base embedding"), "bundle.base-embedding", || {
            Outcome::Fail(Witness::new(name, "", ""), e.to_string())
        })),
    }
    report
}
