//! Gauge transformations of a glued bundle: chart families of convolution
//! invertible maps `tau_i : H -> B_i`, the glued map `g : H -> P`, the
//! induced automorphisms of the total space and their group structure.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::bundle::{act_on_chart, Bundle, Sample, TotalElement};
use crate::error::{Error, Result};
use crate::hopf::{conv_inverse_witness, Antipode, HopfAlgebra, InverseSide, LinMap, LinMapKind, TensorElement};
use crate::linalg::{self, Solution};
use crate::memo::Memo;
use crate::ncpoly::{Element, Presentation, Word};
use crate::report::{
    check, first_witness, CheckRecord, Outcome, Report, Witness, NOTE_CHART_CHANGE, NOTE_DEGREE, NOTE_LEFT_RIGHT,
};
use crate::scalar::Coeff;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// Order of the outer transition factors in the compatibility identity
/// `pi^i_j(tau_i(h)) = sum t(h_1) pi^j_i(tau_j(h_2)) t'(h_3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompatibilityOrder {
    /// `t = tau_ji`, `t' = tau_ij`: the form forced by gluing under the
    /// chart change `b (x) h -> sum b tau_ij(h_1) (x) h_2`.
    ChartChange,
    /// `t = tau_ij`, `t' = tau_ji`.
    Printed,
}

/// Chart maps `tau_i` and their convolution inverses.
#[derive(Clone)]
pub struct GaugeFamily<R> {
    name: String,
    bundle: Arc<Bundle<R>>,
    side: Side,
    taus: Vec<LinMap<R>>,
    tau_invs: Vec<LinMap<R>>,
}

/// Default convolution inverse for a side, read off the constructor tree.
pub(crate) fn default_inverse<R: Coeff>(tau: &LinMap<R>, side: Side) -> Option<LinMap<R>> {
    match side {
        Side::Left => tau.default_inverse(),
        Side::Right => match tau.kind() {
            LinMapKind::Counit => Some(tau.clone()),
            LinMapKind::Hom(_) | LinMapKind::Identity => tau.precompose(Antipode::SInv).ok(),
            LinMapKind::ConvolveOpposite(f, g) => {
                LinMap::convolve_opposite(&default_inverse(g, side)?, &default_inverse(f, side)?).ok()
            }
            _ => None,
        },
    }
}

impl<R: Coeff> GaugeFamily<R> {
    /// `tau_invs[i] = None` derives the inverse from the antipode where the
    /// constructor of `taus[i]` allows it.
    pub fn new(
        name: &str,
        bundle: &Arc<Bundle<R>>,
        side: Side,
        taus: Vec<LinMap<R>>,
        tau_invs: Vec<Option<LinMap<R>>>,
    ) -> Result<Self> {
        let n = bundle.charts().len();
        if taus.len() != n || tau_invs.len() != n {
            return Err(Error::InvalidPresentation {
                name: name.to_string(),
                reason: format!("expected one map per chart ({n})"),
            });
        }
        if side == Side::Right && !bundle.fibre().has_antipode_inv() {
            return Err(Error::MissingAntipodeInverse(bundle.fibre().name().to_string()));
        }
        let mut invs = Vec::with_capacity(n);
        for (i, (tau, inv)) in taus.iter().zip(tau_invs).enumerate() {
            let chart = &bundle.charts()[i];
            for m in std::iter::once(tau).chain(inv.as_ref()) {
                if !Arc::ptr_eq(m.source(), bundle.fibre()) || !Arc::ptr_eq(m.target(), &chart.algebra) {
                    return Err(Error::IncompatibleMaps(format!(
                        "`{m}` is not a map {} -> {}",
                        bundle.fibre().name(),
                        chart.algebra.name()
                    )));
                }
            }
            let inv = match inv {
                Some(v) => v,
                None => default_inverse(tau, side).ok_or_else(|| {
                    Error::IncompatibleMaps(format!("no convolution inverse declared or derivable for `{tau}`"))
                })?,
            };
            invs.push(inv);
        }
        Ok(GaugeFamily { name: name.to_string(), bundle: bundle.clone(), side, taus, tau_invs: invs })
    }

    /// `tau_i = e(.) 1` on every chart.
    pub fn identity(bundle: &Arc<Bundle<R>>, side: Side) -> Self {
        let taus: Vec<_> =
            bundle.charts().iter().map(|c| LinMap::counit(bundle.fibre(), &c.algebra)).collect();
        GaugeFamily { name: "identity".into(), bundle: bundle.clone(), side, tau_invs: taus.clone(), taus }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bundle(&self) -> &Arc<Bundle<R>> {
        &self.bundle
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn tau(&self, i: usize) -> &LinMap<R> {
        &self.taus[i]
    }

    pub fn tau_inv(&self, i: usize) -> &LinMap<R> {
        &self.tau_invs[i]
    }

    fn chart_label(&self, i: usize) -> &str {
        &self.bundle.charts()[i].label
    }

    /// Both sides of the compatibility identity for the ordered overlap
    /// `(i, j)` on a normal word of `H`.
    pub fn compatibility_sides(
        &self,
        i: usize,
        j: usize,
        w: &Word,
        order: CompatibilityOrder,
    ) -> Result<(Element<R>, Element<R>)> {
        let b = &self.bundle;
        let (oij, oji) = (
            b.overlap(i, j).ok_or_else(|| Error::Transition(format!("no overlap {}", b.pair_label(i, j))))?,
            b.overlap(j, i).ok_or_else(|| Error::Transition(format!("no overlap {}", b.pair_label(j, i))))?,
        );
        let (first, last) = match order {
            CompatibilityOrder::ChartChange => (&oji.transition, &oij.transition),
            CompatibilityOrder::Printed => (&oij.transition, &oji.transition),
        };
        let lhs = oij.restriction.map_element(&self.taus[i].eval_word(w));
        let mut rhs = Element::zero(&oij.algebra);
        for (legs, c) in b.fibre().iterated_word(w, 2).terms() {
            let mid = oji.restriction.map_element(&self.taus[j].eval_word(&legs[1]));
            if mid.is_zero() {
                continue;
            }
            let term = &(&first.eval_word(&legs[0]) * &mid) * &last.eval_word(&legs[2]);
            rhs = &rhs + &term.scale(c);
        }
        Ok((lhs, rhs))
    }

    /// First word of degree `<= degree` and overlap where the compatibility
    /// identity fails.
    pub fn compatibility_witness(&self, degree: usize, order: CompatibilityOrder) -> Result<Option<Witness>> {
        let basis = self.bundle.fibre().basis(degree);
        for (i, j) in self.bundle.overlap_pairs() {
            for w in &basis {
                let (lhs, rhs) = self.compatibility_sides(i, j, w, order)?;
                if lhs != rhs {
                    return Ok(Some(Witness::new(
                        format!(
                            "{} over overlap {}",
                            self.bundle.fibre().word_string(w),
                            self.bundle.pair_label(i, j)
                        ),
                        lhs,
                        rhs,
                    )));
                }
            }
        }
        Ok(None)
    }

    /// Chart-wise checks: unitality, the convolution-inverse identities and
    /// both orders of the compatibility identity.
    pub fn check(&self, degree: usize) -> Report {
        let mut report = Report::new();
        report.note(NOTE_CHART_CHANGE);
        report.note(NOTE_DEGREE);
        let twisted = self.side == Side::Right;
        for i in 0..self.taus.len() {
            let label = self.chart_label(i).to_string();
            report.push(check(format!("{}: tau_{label}(1) = 1", self.name), "family.unital", || {
                let v = self.taus[i].unit_value();
                let one = Element::one(self.taus[i].target());
                Outcome::from_witness((v != one).then(|| Witness::new("1", &v, &one)), "unital", "tau(1) != 1")
            }));
            report.push(check(
                format!("{}: tau_{label} convolution invertible", self.name),
                if twisted { "family.inverse-twisted" } else { "family.inverse" },
                || match conv_inverse_witness(&self.taus[i], &self.tau_invs[i], degree, InverseSide::Both, twisted) {
                    Ok(w) => Outcome::from_witness(w, format!("words up to degree {degree}"), "not a convolution inverse"),
                    Err(e) => Outcome::Fail(Witness::new(&label, &self.taus[i], &self.tau_invs[i]), e.to_string()),
                },
            ));
        }
        for (order, name, anchor) in [
            (CompatibilityOrder::ChartChange, "compatibility", "family.compatibility"),
            (CompatibilityOrder::Printed, "compatibility (tau_ij first)", "family.compatibility-printed"),
        ] {
            report.push(check(format!("{}: {name}", self.name), anchor, || {
                match self.compatibility_witness(degree, order) {
                    Ok(w) => Outcome::from_witness(w, format!("words up to degree {degree}"), "compatibility fails"),
                    Err(e) => Outcome::Fail(Witness::new(&self.name, "", ""), e.to_string()),
                }
            }));
        }
        report
    }
}

impl<R: Coeff> fmt::Debug for GaugeFamily<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugeFamily")
            .field("name", &self.name)
            .field("side", &self.side)
            .field("taus", &self.taus)
            .field("tau_invs", &self.tau_invs)
            .finish()
    }
}

/// A gauge transformation: a family together with the glued maps
/// `g, g^-1 : H -> P`.
pub struct GaugeTransformation<R> {
    family: GaugeFamily<R>,
    locals: Memo<(bool, usize, Word), TensorElement<R>>,
}

impl<R: Coeff> Clone for GaugeTransformation<R> {
    fn clone(&self) -> Self {
        GaugeTransformation { family: self.family.clone(), locals: self.locals.clone() }
    }
}

impl<R: Coeff> fmt::Debug for GaugeTransformation<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugeTransformation").field("family", &self.family).finish()
    }
}

/// Validates a family up to `degree` and glues its chart maps: rejects on
/// the first failure of the compatibility identity, then on the first word
/// whose chart images `g_i(h)` do not glue.
pub fn build_gauge_from_family<R: Coeff>(family: GaugeFamily<R>, degree: usize) -> Result<GaugeTransformation<R>> {
    if let Some(w) = family.compatibility_witness(degree, CompatibilityOrder::ChartChange)? {
        let (monomial, overlap) = w.subject.split_once(" over overlap ").unwrap_or((&w.subject, ""));
        return Err(Error::Compatibility {
            overlap: overlap.to_string(),
            monomial: monomial.to_string(),
            lhs: w.lhs,
            rhs: w.rhs,
        });
    }
    let t = GaugeTransformation::from_family_unchecked(family);
    for h in t.fibre().basis(degree) {
        for inverse in [false, true] {
            let v = t.g_word(&h, inverse);
            if let Some(w) = t.bundle().gluing_witness(&v.locals)? {
                return Err(Error::Gluing {
                    overlap: w.subject.trim_start_matches("overlap ").to_string(),
                    lhs: format!("{} on {}: {}", if inverse { "g^-1" } else { "g" }, t.fibre().word_string(&h), w.lhs),
                    rhs: w.rhs,
                });
            }
        }
    }
    Ok(t)
}

/// Pair of total-space elements on which a transformation is not
/// multiplicative.
#[derive(Clone)]
pub struct NonAutomorphism<R> {
    pub f: TotalElement<R>,
    pub g: TotalElement<R>,
    /// `alpha(f g)`.
    pub image_of_product: TotalElement<R>,
    /// `alpha(f) alpha(g)`.
    pub product_of_images: TotalElement<R>,
}

impl<R: Coeff> fmt::Debug for NonAutomorphism<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.witness())
    }
}

impl<R: Coeff> NonAutomorphism<R> {
    /// The scalar `c` with `alpha(f) alpha(g) = c alpha(f g)`, if any.
    pub fn ratio(&self) -> Option<R> {
        let (a, b) = (&self.image_of_product, &self.product_of_images);
        let (k, (key, c)) =
            a.locals.iter().enumerate().find_map(|(k, t)| t.terms().iter().next().map(|e| (k, e)))?;
        let c = b.locals[k].coefficient(key) * c.try_inverse()?;
        (a.scale(&c) == *b).then_some(c)
    }

    pub fn witness(&self) -> Witness {
        Witness::new(
            format!("f = {}, g = {}", self.f, self.g),
            format!("alpha(f g) = {}", self.image_of_product),
            format!("alpha(f) alpha(g) = {}", self.product_of_images),
        )
    }
}

impl<R: Coeff> GaugeTransformation<R> {
    /// Wraps a family without checking that its chart maps glue.
    pub fn from_family_unchecked(family: GaugeFamily<R>) -> Self {
        GaugeTransformation { family, locals: Memo::new() }
    }

    pub fn identity(bundle: &Arc<Bundle<R>>, side: Side) -> Self {
        Self::from_family_unchecked(GaugeFamily::identity(bundle, side))
    }

    pub fn family(&self) -> &GaugeFamily<R> {
        &self.family
    }

    pub fn side(&self) -> Side {
        self.family.side
    }

    pub fn bundle(&self) -> &Arc<Bundle<R>> {
        &self.family.bundle
    }

    pub fn fibre(&self) -> &Arc<HopfAlgebra<R>> {
        self.family.bundle.fibre()
    }

    fn fibre_algebra(&self) -> &Arc<Presentation<R>> {
        self.fibre().algebra()
    }

    /// `g_i(h) = sum tau_i(h_2) (x) S(h_1) h_3` (left) or
    /// `sum tau_i(h_2) (x) h_3 S^-1(h_1)` (right); with `inverse` the same
    /// built from `tau_i^-1`.
    pub fn g_local(&self, i: usize, h: &Word, inverse: bool) -> TensorElement<R> {
        let key = (inverse, i, h.clone());
        if let Some(v) = self.locals.get(&key) {
            return v;
        }
        let fibre = self.fibre();
        let tau = if inverse { &self.family.tau_invs[i] } else { &self.family.taus[i] };
        let mut out = TensorElement::zero(&self.bundle().local_slots(i));
        for (legs, c) in fibre.iterated_word(h, 2).terms() {
            let value = tau.eval_word(&legs[1]);
            if value.is_zero() {
                continue;
            }
            let third = Element::from_word(self.fibre_algebra(), &legs[2], R::one());
            let fib = match self.side() {
                Side::Left => &fibre.antipode_word(&legs[0]) * &third,
                Side::Right => &third * &fibre.antipode_inv_word(&legs[0]).expect("checked at construction"),
            };
            out = &out + &TensorElement::pure(&[&value, &fib]).scale(c);
        }
        self.locals.insert(key, out.clone());
        out
    }

    /// `g(h)` (or `g^-1(h)`) as a total-space element.
    pub fn g_word(&self, h: &Word, inverse: bool) -> TotalElement<R> {
        TotalElement { locals: (0..self.bundle().charts().len()).map(|i| self.g_local(i, h, inverse)).collect() }
    }

    pub fn g(&self, h: &Element<R>, inverse: bool) -> TotalElement<R> {
        let mut out = self.bundle().total_zero();
        for (w, c) in h.terms() {
            out = &out + &self.g_word(w, inverse).scale(c);
        }
        out
    }

    /// `sum f_0 g(f_1)` (left) or `sum g(f_1) f_0` (right), chart-wise on a
    /// tensor whose first two slots are `B_i (x) H`; later slots are
    /// carried along.
    fn act_local(&self, i: usize, t: &TensorElement<R>, inverse: bool) -> TensorElement<R> {
        let h = self.fibre_algebra();
        let slots = t.slots().to_vec();
        let mut out = TensorElement::zero(&slots);
        for (ws, c) in t.terms() {
            let b = Element::from_word(&slots[0], &ws[0], R::one());
            for (legs, d) in self.fibre().iterated_word(&ws[1], 1).terms() {
                let f0 = TensorElement::pure(&[&b, &Element::from_word(h, &legs[0], R::one())]);
                let g = self.g_local(i, &legs[1], inverse);
                let prod = match self.side() {
                    Side::Left => &f0 * &g,
                    Side::Right => &g * &f0,
                };
                let rest: Vec<Element<R>> =
                    ws[2..].iter().zip(&slots[2..]).map(|(w, p)| Element::from_word(p, w, R::one())).collect();
                let rest_refs: Vec<&Element<R>> = rest.iter().collect();
                let term = prod.tensor(&TensorElement::pure(&rest_refs));
                out = &out + &term.scale(&(c.clone() * d.clone()));
            }
        }
        out
    }

    fn act(&self, f: &TotalElement<R>, inverse: bool) -> TotalElement<R> {
        TotalElement { locals: f.locals.iter().enumerate().map(|(i, t)| self.act_local(i, t, inverse)).collect() }
    }

    /// The automorphism `alpha` of the total space.
    pub fn apply(&self, f: &TotalElement<R>) -> TotalElement<R> {
        self.act(f, false)
    }

    /// `alpha^-1`, from the inverse maps.
    pub fn apply_inverse(&self, f: &TotalElement<R>) -> TotalElement<R> {
        self.act(f, true)
    }

    /// The chart formula `sum a tau_i(h_1) (x) h_2` (left) or
    /// `sum tau_i(h_1) a (x) h_2` (right).
    pub fn chart_action(&self, i: usize, t: &TensorElement<R>) -> TensorElement<R> {
        act_on_chart(self.fibre(), t, &self.family.taus[i], self.side() == Side::Right)
    }

    fn same_bundle(&self, other: &Self) -> Result<()> {
        if self.side() != other.side() {
            return Err(Error::SideMismatch);
        }
        if !Arc::ptr_eq(self.bundle(), other.bundle()) {
            return Err(Error::IncompatibleMaps("gauge transformations of different bundles".into()));
        }
        Ok(())
    }

    /// `self o other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_bundle(other)?;
        let (s, t) = (&self.family, &other.family);
        let n = s.taus.len();
        let mut taus = Vec::with_capacity(n);
        let mut invs = Vec::with_capacity(n);
        for i in 0..n {
            match self.side() {
                Side::Left => {
                    taus.push(LinMap::convolve(&t.taus[i], &s.taus[i])?);
                    invs.push(LinMap::convolve(&s.tau_invs[i], &t.tau_invs[i])?);
                }
                Side::Right => {
                    taus.push(LinMap::convolve_opposite(&s.taus[i], &t.taus[i])?);
                    invs.push(LinMap::convolve_opposite(&t.tau_invs[i], &s.tau_invs[i])?);
                }
            }
        }
        let family = GaugeFamily {
            name: format!("{} o {}", s.name, t.name),
            bundle: s.bundle.clone(),
            side: s.side,
            taus,
            tau_invs: invs,
        };
        Ok(Self::from_family_unchecked(family))
    }

    pub fn invert(&self) -> Self {
        let f = &self.family;
        Self::from_family_unchecked(GaugeFamily {
            name: format!("{}^-1", f.name),
            bundle: f.bundle.clone(),
            side: f.side,
            taus: f.tau_invs.clone(),
            tau_invs: f.taus.clone(),
        })
    }

    fn resided(&self, side: Side, s: Antipode, suffix: &str) -> Result<Self> {
        let f = &self.family;
        let taus = f.taus.iter().map(|t| t.precompose(s)).collect::<Result<Vec<_>>>()?;
        let tau_invs = f.tau_invs.iter().map(|t| t.precompose(s)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_family_unchecked(GaugeFamily {
            name: format!("{}{suffix}", f.name),
            bundle: f.bundle.clone(),
            side,
            taus,
            tau_invs,
        }))
    }

    /// `g_right = g_left o S^-1`, chart-wise `tau_right = tau_left o S^-1`.
    pub fn left_to_right(&self) -> Result<Self> {
        if self.side() != Side::Left {
            return Err(Error::SideMismatch);
        }
        self.resided(Side::Right, Antipode::SInv, "_r")
    }

    /// `g_left = g_right o S`.
    pub fn right_to_left(&self) -> Result<Self> {
        if self.side() != Side::Right {
            return Err(Error::SideMismatch);
        }
        self.resided(Side::Left, Antipode::S, "_l")
    }
}

/// First sampled total-space element on which two transformations differ.
pub fn agreement_witness<R: Coeff>(
    s: &GaugeTransformation<R>,
    t: &GaugeTransformation<R>,
    degree: usize,
) -> Result<Option<Witness>> {
    s.same_bundle(t)?;
    let basis = s.bundle().total_basis(degree)?;
    Ok(first_witness(&basis, |f| {
        let (a, b) = (s.apply(&f.element), t.apply(&f.element));
        (a != b).then(|| Witness::new(&f.element, a, b))
    }))
}

/// First sampled total-space element that `t` moves.
pub fn identity_witness<R: Coeff>(t: &GaugeTransformation<R>, degree: usize) -> Result<Option<Witness>> {
    let basis = t.bundle().total_basis(degree)?;
    Ok(first_witness(&basis, |f| {
        let a = t.apply(&f.element);
        (a != f.element).then(|| Witness::new(&f.element, a, &f.element))
    }))
}

fn total_product_sum<R: Coeff>(
    t: &GaugeTransformation<R>,
    h: &Word,
    first_inverse: bool,
) -> TotalElement<R> {
    // sum g(h_1) g^-1(h_2) (left) or sum g(h_2) g^-1(h_1) (right), with the
    // roles of g and g^-1 swapped by `first_inverse`
    let mut out = t.bundle().total_zero();
    for (legs, c) in t.fibre().iterated_word(h, 1).terms() {
        let (a, b) = match t.side() {
            Side::Left => (&legs[0], &legs[1]),
            Side::Right => (&legs[1], &legs[0]),
        };
        let p = &t.g_word(a, first_inverse) * &t.g_word(b, !first_inverse);
        out = &out + &p.scale(c);
    }
    out
}

fn sample_pairs<'a, T>(samples: &'a [Sample<T>], degree: usize) -> Vec<(&'a Sample<T>, &'a Sample<T>)> {
    let mut pairs = Vec::new();
    for d in 0..=degree {
        for f in samples {
            for g in samples {
                if f.degree + g.degree == d {
                    pairs.push((f, g));
                }
            }
        }
    }
    pairs
}

/// The gauge-transformation properties up to `degree`: unitality of `g`,
/// `g` landing in the total space, the coaction identity, the
/// convolution-inverse identities, equivariance, agreement with the chart
/// formula, base-module linearity and preservation of chart kernels.
pub fn verify_gauge<R: Coeff>(t: &GaugeTransformation<R>, degree: usize) -> Report {
    let mut report = Report::new();
    report.note(NOTE_CHART_CHANGE);
    report.note(NOTE_DEGREE);
    let name = t.family().name().to_string();
    let side = t.side();
    let bundle = t.bundle();
    let fibre = t.fibre();
    let h = fibre.algebra();
    let hw = fibre.basis(degree);

    report.push(check(format!("{name}: g(1) = 1"), "gauge.unital", || {
        let g1 = t.g_word(&Word::empty(), false);
        let one = bundle.total_one();
        Outcome::from_witness((g1 != one).then(|| Witness::new("1", &g1, &one)), "g(1) = 1", "g(1) != 1")
    }));
    report.push(check(format!("{name}: g maps into the total space"), "gauge.glued", || {
        let w = first_witness(&hw, |w| {
            [false, true].into_iter().find_map(|inv| {
                let v = t.g_word(w, inv);
                bundle.gluing_witness(&v.locals).unwrap_or_else(|e| Some(Witness::new(&v, e, ""))).map(|x| {
                    Witness::new(
                        format!("{}({}) on {}", if inv { "g^-1" } else { "g" }, fibre.word_string(w), x.subject),
                        x.lhs,
                        x.rhs,
                    )
                })
            })
        });
        Outcome::from_witness(w, format!("{} words", hw.len()), "g(h) does not glue")
    }));
    let (coaction_name, coaction_anchor) = match side {
        Side::Left => ("D_P(g(h)) = sum g(h_2) (x) S(h_1) h_3", "gauge.coaction-left"),
        Side::Right => ("D_P(g(h)) = sum g(h_2) (x) h_3 S^-1(h_1)", "gauge.coaction-right"),
    };
    report.push(check(format!("{name}: {coaction_name}"), coaction_anchor, || {
        let w = first_witness(&hw, |w| {
            let g = t.g_word(w, false);
            let lhs = bundle.coaction(&g);
            let mut rhs: Vec<TensorElement<R>> = lhs.iter().map(|x| TensorElement::zero(x.slots())).collect();
            for (legs, c) in fibre.iterated_word(w, 2).terms() {
                let third = Element::from_word(h, &legs[2], R::one());
                let fib = match side {
                    Side::Left => &fibre.antipode_word(&legs[0]) * &third,
                    Side::Right => match fibre.antipode_inv_word(&legs[0]) {
                        Ok(s) => &third * &s,
                        Err(e) => return Some(Witness::new(fibre.word_string(w), e, "")),
                    },
                };
                let leg = TensorElement::pure(&[&fib]);
                for (k, gl) in t.g_word(&legs[1], false).locals.iter().enumerate() {
                    rhs[k] = &rhs[k] + &gl.tensor(&leg).scale(c);
                }
            }
            (lhs != rhs).then(|| Witness::new(fibre.word_string(w), format!("{lhs:?}"), format!("{rhs:?}")))
        });
        Outcome::from_witness(w, format!("{} words", hw.len()), "coaction identity fails")
    }));
    let inverse_name = match side {
        Side::Left => "sum g(h_1) g^-1(h_2) = sum g^-1(h_1) g(h_2) = e(h) 1",
        Side::Right => "sum g(h_2) g^-1(h_1) = sum g^-1(h_2) g(h_1) = e(h) 1",
    };
    report.push(check(
        format!("{name}: {inverse_name}"),
        if side == Side::Left { "gauge.inverse-left" } else { "gauge.inverse-right" },
        || {
            let w = first_witness(&hw, |w| {
                let unit = bundle.total_one().scale(&fibre.counit_word(w));
                [false, true].into_iter().find_map(|first_inverse| {
                    let v = total_product_sum(t, w, first_inverse);
                    (v != unit).then(|| Witness::new(fibre.word_string(w), &v, &unit))
                })
            });
            Outcome::from_witness(w, format!("{} words", hw.len()), "g^-1 is not a convolution inverse")
        },
    ));

    let basis = match bundle.total_basis(degree) {
        Ok(b) => b,
        Err(e) => {
            report.push(check(format!("{name}: total-space spanning set"), "bundle.spanning-set", || {
                Outcome::Fail(Witness::new(bundle.name(), "", ""), e.to_string())
            }));
            return report;
        }
    };
    report.push(check(format!("{name}: alpha maps the total space to itself"), "gauge.closed", || {
        let w = first_witness(&basis, |f| {
            let a = t.apply(&f.element);
            bundle
                .gluing_witness(&a.locals)
                .unwrap_or_else(|e| Some(Witness::new(&a, e, "")))
                .map(|x| Witness::new(format!("alpha({}) on {}", f.element, x.subject), x.lhs, x.rhs))
        });
        Outcome::from_witness(w, format!("{} elements", basis.len()), "alpha(f) does not glue")
    }));
    report.push(check(format!("{name}: chart formula"), "gauge.chart-action", || {
        let w = first_witness(&basis, |f| {
            let a = t.apply(&f.element);
            a.locals.iter().enumerate().find_map(|(i, x)| {
                let y = t.chart_action(i, &f.element.locals[i]);
                (x != &y).then(|| Witness::new(format!("chart {} of alpha({})", bundle.charts()[i].label, f.element), x, &y))
            })
        });
        Outcome::from_witness(w, format!("{} elements", basis.len()), "alpha differs from the chart formula")
    }));
    report.push(check(format!("{name}: equivariance"), "gauge.equivariance", || {
        let w = first_witness(&basis, |f| {
            let lhs = bundle.coaction(&t.apply(&f.element));
            let d = bundle.coaction(&f.element);
            let rhs: Vec<_> = d.iter().enumerate().map(|(i, x)| t.act_local(i, x, false)).collect();
            (lhs != rhs).then(|| Witness::new(&f.element, format!("{lhs:?}"), format!("{rhs:?}")))
        });
        Outcome::from_witness(w, format!("{} elements", basis.len()), "alpha does not commute with the coaction")
    }));
    report.push(check(format!("{name}: alpha^-1 alpha = id"), "gauge.invertible", || {
        let w = first_witness(&basis, |f| {
            let back = t.apply_inverse(&t.apply(&f.element));
            let there = t.apply(&t.apply_inverse(&f.element));
            (back != f.element || there != f.element).then(|| Witness::new(&f.element, &back, &there))
        });
        Outcome::from_witness(w, format!("{} elements", basis.len()), "inverse does not undo alpha")
    }));
    match bundle.base_basis(degree) {
        Ok(base) => {
            let (lin_name, lin_anchor) = match side {
                Side::Left => ("alpha(iota(b) f) = iota(b) alpha(f)", "gauge.module-left"),
                Side::Right => ("alpha(f iota(b)) = alpha(f) iota(b)", "gauge.module-right"),
            };
            report.push(check(format!("{name}: {lin_name}"), lin_anchor, || {
                let mut n = 0;
                let w = first_witness(base.iter().flat_map(|b| basis.iter().map(move |f| (b, f))), |(b, f)| {
                    if b.degree + f.degree > degree {
                        return None;
                    }
                    n += 1;
                    let ib = bundle.embed(&b.element);
                    let (lhs, rhs) = match side {
                        Side::Left => (t.apply(&(&ib * &f.element)), &ib * &t.apply(&f.element)),
                        Side::Right => (t.apply(&(&f.element * &ib)), &t.apply(&f.element) * &ib),
                    };
                    (lhs != rhs).then(|| Witness::new(format!("b = {}, f = {}", b.element, f.element), lhs, rhs))
                });
                Outcome::from_witness(w, format!("{n} pairs"), "alpha is not base-linear")
            }));
        }
        Err(e) => report.push(check(format!("{name}: base linearity"), "gauge.module", || {
            Outcome::Fail(Witness::new(bundle.name(), "", ""), e.to_string())
        })),
    }
    report.push(check(format!("{name}: chart kernels preserved"), "gauge.kernels", || {
        let mut n = 0;
        let w = first_witness(0..bundle.charts().len(), |i| {
            first_witness(&basis, |f| {
                if !f.element.locals[i].is_zero() {
                    return None;
                }
                n += 1;
                let a = t.apply(&f.element);
                (!a.locals[i].is_zero()).then(|| {
                    Witness::new(format!("chart {} of alpha({})", bundle.charts()[i].label, f.element), &a.locals[i], "0")
                })
            })
        });
        Outcome::from_witness(w, format!("{n} kernel samples"), "alpha moves a chart kernel")
    }));
    report
}

/// Family checks followed, when the chart maps glue, by [`verify_gauge`].
pub fn check_family<R: Coeff>(family: &GaugeFamily<R>, degree: usize) -> (Report, Option<GaugeTransformation<R>>) {
    let mut report = family.check(degree);
    let name = family.name().to_string();
    let built = build_gauge_from_family(family.clone(), degree);
    report.push(check(format!("{name}: chart maps glue"), "gauge.build", || match &built {
        Ok(_) => Outcome::Pass(format!("words up to degree {degree}")),
        Err(Error::Compatibility { overlap, monomial, lhs, rhs }) => Outcome::Fail(
            Witness::new(format!("{monomial} over overlap {overlap}"), lhs, rhs),
            "compatibility identity fails".into(),
        ),
        Err(Error::Gluing { overlap, lhs, rhs }) => {
            Outcome::Fail(Witness::new(format!("overlap {overlap}"), lhs, rhs), "g_i do not glue".into())
        }
        Err(e) => Outcome::Fail(Witness::new(&name, "", ""), e.to_string()),
    }));
    match built {
        Ok(t) => {
            report.extend(verify_gauge(&t, degree));
            (report, Some(t))
        }
        Err(_) => (report, None),
    }
}

/// Searches pairs of sampled total-space elements, by combined degree and
/// then sample order, for `alpha(f g) != alpha(f) alpha(g)`.
pub fn find_non_automorphism_witness<R: Coeff>(
    t: &GaugeTransformation<R>,
    degree: usize,
) -> Result<Option<NonAutomorphism<R>>> {
    let basis = t.bundle().total_basis(degree)?;
    for (f, g) in sample_pairs(&basis, degree) {
        if let Some(w) = non_automorphism_on(t, &f.element, &g.element) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// The pair `(f, g)` as a witness if `alpha` is not multiplicative on it.
pub fn non_automorphism_on<R: Coeff>(
    t: &GaugeTransformation<R>,
    f: &TotalElement<R>,
    g: &TotalElement<R>,
) -> Option<NonAutomorphism<R>> {
    let lhs = t.apply(&(f * g));
    let rhs = &t.apply(f) * &t.apply(g);
    (lhs != rhs).then(|| NonAutomorphism {
        f: f.clone(),
        g: g.clone(),
        image_of_product: lhs,
        product_of_images: rhs,
    })
}

/// Converts a left transformation to a right one and checks the result:
/// twisted inverse identities, the round trip on generators and
/// [`verify_gauge`] on the right transformation.
pub fn check_left_right<R: Coeff>(t: &GaugeTransformation<R>, degree: usize) -> Report {
    let mut report = Report::new();
    report.note(NOTE_LEFT_RIGHT);
    let name = t.family().name().to_string();
    let right = match t.left_to_right() {
        Ok(r) => r,
        Err(e) => {
            report.push(check(format!("{name}: left to right"), "gauge.left-right", || {
                Outcome::Fail(Witness::new(&name, "", ""), e.to_string())
            }));
            return report;
        }
    };
    for i in 0..t.bundle().charts().len() {
        report.push(crate::hopf::check_conv_inverse(
            right.family().tau(i),
            right.family().tau_inv(i),
            degree,
            InverseSide::Both,
            true,
        ));
    }
    report.push(check(format!("{name}: right to left to right"), "gauge.left-right-roundtrip", || {
        let back = right.right_to_left().expect("right side");
        let fibre = t.fibre();
        let w = first_witness(0..t.bundle().charts().len(), |i| {
            first_witness(0..fibre.algebra().generators().len() as u16, |g| {
                let w = Word::letter(g);
                let (a, b) = (back.family().tau(i).eval_word(&w), t.family().tau(i).eval_word(&w));
                (a != b).then(|| Witness::new(fibre.word_string(&w), a, b))
            })
        });
        Outcome::from_witness(w, "all generators", "round trip changes tau")
    }));
    report.extend(verify_gauge(&right, degree));
    report
}

/// A square matrix over `H` with `D(u_kl) = sum_m u_km (x) u_ml`.
#[derive(Clone)]
pub struct Corep<R> {
    pub name: String,
    pub hopf: Arc<HopfAlgebra<R>>,
    pub entries: Vec<Vec<Element<R>>>,
}

impl<R: Coeff> fmt::Debug for Corep<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Corep").field("name", &self.name).field("entries", &self.entries).finish()
    }
}

impl<R: Coeff> Corep<R> {
    pub fn new(name: &str, hopf: &Arc<HopfAlgebra<R>>, entries: Vec<Vec<Element<R>>>) -> Result<Self> {
        let n = entries.len();
        let invalid = |reason: String| Error::InvalidPresentation { name: name.to_string(), reason };
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(invalid("corepresentation matrix must be square and nonempty".into()));
        }
        if entries.iter().flatten().any(|e| !Arc::ptr_eq(e.presentation(), hopf.algebra())) {
            return Err(invalid(format!("entries must lie in {}", hopf.algebra().name())));
        }
        Ok(Corep { name: name.to_string(), hopf: hopf.clone(), entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// First entry violating the corepresentation identity.
    pub fn witness(&self) -> Option<Witness> {
        let n = self.size();
        let slots = [self.hopf.algebra().clone(), self.hopf.algebra().clone()];
        first_witness((0..n).flat_map(|k| (0..n).map(move |l| (k, l))), |(k, l)| {
            let lhs = self.hopf.coproduct(&self.entries[k][l]);
            let mut rhs = TensorElement::zero(&slots);
            for m in 0..n {
                rhs = &rhs + &TensorElement::pure(&[&self.entries[k][m], &self.entries[m][l]]);
            }
            (lhs != rhs).then(|| Witness::new(format!("u_{}{}", k + 1, l + 1), lhs, rhs))
        })
    }
}

type Matrix<R> = Vec<Vec<Element<R>>>;

/// Per-chart matrices `b_i = tau_i(u)` and their exact inverses.
#[derive(Clone)]
pub struct CorepMatrices<R> {
    pub per_chart: Vec<Matrix<R>>,
    pub inverses: Vec<Matrix<R>>,
}

impl<R: Coeff> fmt::Debug for CorepMatrices<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CorepMatrices").field("per_chart", &self.per_chart).field("inverses", &self.inverses).finish()
    }
}

fn mat_mul<R: Coeff>(a: &Matrix<R>, b: &Matrix<R>) -> Matrix<R> {
    let n = a.len();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|l| {
                    let mut s = Element::zero(a[k][l].presentation());
                    for m in 0..n {
                        s = &s + &(&a[k][m] * &b[m][l]);
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// First row of `m` that differs from the identity matrix.
fn non_identity_row<R: Coeff>(m: &Matrix<R>) -> Option<usize> {
    let p = m[0][0].presentation();
    (0..m.len()).find(|&k| {
        (0..m.len()).any(|l| m[k][l] != if k == l { Element::one(p) } else { Element::zero(p) })
    })
}

/// Exact inverse of `b` with entries in normal words up to `degree`.
fn solve_inverse<R: Coeff>(b: &Matrix<R>, p: &Arc<Presentation<R>>, degree: usize) -> Result<Matrix<R>> {
    let n = b.len();
    let words = p.normal_words(degree);
    let ncols = n * words.len();
    // products b_km * w for every unknown (m, w)
    let images: Vec<Vec<Element<R>>> = (0..n)
        .map(|k| {
            (0..n)
                .flat_map(|m| words.iter().map(move |w| (m, w)))
                .map(|(m, w)| &b[k][m] * &Element::from_word(p, w, R::one()))
                .collect()
        })
        .collect();
    let mut cols: Vec<Vec<Element<R>>> = Vec::with_capacity(n);
    for l in 0..n {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut row_of = Vec::new();
        for (k, imgs) in images.iter().enumerate() {
            let mut keys: Vec<Word> = imgs.iter().flat_map(|e| e.terms().keys().cloned()).collect();
            if k == l {
                keys.push(Word::empty());
            }
            keys.sort();
            keys.dedup();
            for v in keys {
                rows.push(imgs.iter().map(|e| e.coefficient(&v)).collect());
                rhs.push(if k == l && v.is_empty() { R::one() } else { R::zero() });
                row_of.push(k);
            }
        }
        match linalg::solve(rows, rhs, ncols) {
            Solution::Found(x) => cols.push(
                (0..n)
                    .map(|m| {
                        let raw: Vec<(Word, R)> =
                            words.iter().cloned().zip(x[m * words.len()..(m + 1) * words.len()].iter().cloned()).collect();
                        Element::normalize(p, &raw).expect("normal words")
                    })
                    .collect(),
            ),
            Solution::Inconsistent { row } => return Err(Error::NotInvertible { degree, row: row_of[row] + 1 }),
            Solution::Undetermined => return Err(Error::InverseUndetermined { degree }),
        }
    }
    Ok((0..n).map(|m| (0..n).map(|l| cols[l][m].clone()).collect()).collect())
}

/// Matrices `b_i = tau_i(u)` of a gauge transformation for a
/// corepresentation `u`, their inverses (from `tau_i^-1`, or by exact
/// solving over normal words up to `degree`) and the overlap identity
/// `pi^i_j(b_i,kl) = sum_mn tau_ij(u_km) pi^j_i(b_j,mn) tau_ji(u_nl)`.
pub fn corep_matrix_check<R: Coeff>(
    t: &GaugeTransformation<R>,
    u: &Corep<R>,
    degree: usize,
) -> Result<(CorepMatrices<R>, Report)> {
    let mut report = Report::new();
    report.note(NOTE_CHART_CHANGE);
    report.note(NOTE_DEGREE);
    let bundle = t.bundle();
    let n = u.size();
    let name = &u.name;
    if !Arc::ptr_eq(&u.hopf, bundle.fibre()) {
        return Err(Error::PresentationMismatch {
            left: bundle.fibre().name().to_string(),
            right: u.hopf.name().to_string(),
        });
    }
    report.push(check(format!("{name}: corepresentation identity"), "corep.coproduct", || {
        Outcome::from_witness(u.witness(), "D(u_kl) = sum u_km (x) u_ml", "not a corepresentation")
    }));
    let eval = |map: &LinMap<R>| -> Matrix<R> {
        u.entries.iter().map(|row| row.iter().map(|e| map.eval(e)).collect()).collect()
    };
    let mut per_chart = Vec::new();
    let mut inverses = Vec::new();
    for (i, chart) in bundle.charts().iter().enumerate() {
        let b = eval(t.family().tau(i));
        let candidate = eval(t.family().tau_inv(i));
        let p = &chart.algebra;
        let inverse = if non_identity_row(&mat_mul(&b, &candidate)).is_none()
            && non_identity_row(&mat_mul(&candidate, &b)).is_none()
        {
            candidate
        } else {
            let c = solve_inverse(&b, p, degree)?;
            if let Some(row) = non_identity_row(&mat_mul(&c, &b)) {
                return Err(Error::NotInvertible { degree, row: row + 1 });
            }
            c
        };
        let label = chart.label.clone();
        let (bc, cb) = (mat_mul(&b, &inverse), mat_mul(&inverse, &b));
        report.push(check(format!("{name}: b_{label} invertible"), "corep.invertible", || {
            let w = non_identity_row(&bc)
                .or(non_identity_row(&cb))
                .map(|r| Witness::new(format!("row {}", r + 1), format!("{:?}", bc[r]), format!("{:?}", cb[r])));
            Outcome::from_witness(w, format!("{n}x{n} inverse found"), "b c != 1")
        }));
        per_chart.push(b);
        inverses.push(inverse);
    }
    for (i, j) in bundle.overlap_pairs() {
        for (a, c) in [(i, j), (j, i)] {
            let (oac, oca) = (bundle.overlap(a, c).unwrap(), bundle.overlap(c, a).unwrap());
            let label = bundle.pair_label(a, c);
            report.push(check(format!("{name}: overlap identity on {label}"), "corep.overlap", || {
                let tij: Matrix<R> = eval(&oac.transition);
                let tji: Matrix<R> = eval(&oca.transition);
                let w = first_witness((0..n).flat_map(|k| (0..n).map(move |l| (k, l))), |(k, l)| {
                    let lhs = oac.restriction.map_element(&per_chart[a][k][l]);
                    let mut rhs = Element::zero(&oac.algebra);
                    for m in 0..n {
                        for q in 0..n {
                            let mid = oca.restriction.map_element(&per_chart[c][m][q]);
                            rhs = &rhs + &(&(&tij[k][m] * &mid) * &tji[q][l]);
                        }
                    }
                    (lhs != rhs).then(|| Witness::new(format!("entry {}{}", k + 1, l + 1), lhs, rhs))
                });
                Outcome::from_witness(w, format!("{} entries", n * n), "overlap identity fails")
            }));
        }
    }
    Ok((CorepMatrices { per_chart, inverses }, report))
}

/// Record for a failed [`corep_matrix_check`].
pub fn corep_failure_record(name: &str, e: &Error) -> CheckRecord {
    check(format!("{name}: b_i invertible"), "corep.invertible", || {
        Outcome::Fail(Witness::new(name, "", ""), e.to_string())
    })
}

#[cfg(test)]
mod tests;
