use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::memo::Memo;
use crate::ncpoly::{Element, Morphism, Presentation, Word};
use crate::report::{check, first_witness, CheckRecord, Outcome, Witness};
use crate::scalar::Coeff;

use super::algebra::HopfAlgebra;

/// Which antipode a map is precomposed with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Antipode {
    S,
    SInv,
}

/// Constructor tree of a [`LinMap`].
pub enum LinMapKind<R> {
    /// `h -> e(h) 1`.
    Counit,
    /// `h -> h`; the target is the Hopf algebra itself.
    Identity,
    /// Algebra map given on generators.
    Hom(Arc<Morphism<R>>),
    /// Values on normal words; zero off the table.
    Table(BTreeMap<Word, Element<R>>),
    /// `sum f(h_1) g(h_2)`.
    Convolve(LinMap<R>, LinMap<R>),
    /// `sum f(h_2) g(h_1)`.
    ConvolveOpposite(LinMap<R>, LinMap<R>),
    /// `sum f(h_1) ... f(h_n)`.
    ConvPower(LinMap<R>, u32),
    /// `f o S` or `f o S^-1`.
    Precompose(LinMap<R>, Antipode),
}

struct Inner<R> {
    source: Arc<HopfAlgebra<R>>,
    target: Arc<Presentation<R>>,
    kind: LinMapKind<R>,
    memo: Memo<Word, Element<R>>,
}

/// Linear map out of a Hopf algebra into a presented algebra, evaluated
/// lazily on normal words and memoized.
pub struct LinMap<R>(Arc<Inner<R>>);

impl<R> Clone for LinMap<R> {
    fn clone(&self) -> Self {
        LinMap(self.0.clone())
    }
}

impl<R: Coeff> LinMap<R> {
    fn make(source: &Arc<HopfAlgebra<R>>, target: &Arc<Presentation<R>>, kind: LinMapKind<R>) -> Self {
        LinMap(Arc::new(Inner { source: source.clone(), target: target.clone(), kind, memo: Memo::new() }))
    }

    pub fn counit(source: &Arc<HopfAlgebra<R>>, target: &Arc<Presentation<R>>) -> Self {
        Self::make(source, target, LinMapKind::Counit)
    }

    pub fn identity(source: &Arc<HopfAlgebra<R>>) -> Self {
        Self::make(source, source.algebra(), LinMapKind::Identity)
    }

    pub fn hom(source: &Arc<HopfAlgebra<R>>, m: &Arc<Morphism<R>>) -> Result<Self> {
        if !Arc::ptr_eq(m.source(), source.algebra()) {
            return Err(Error::PresentationMismatch {
                left: source.algebra().name().to_string(),
                right: m.source().name().to_string(),
            });
        }
        if !m.is_certified() {
            return Err(Error::UncertifiedMorphism(m.name().to_string()));
        }
        Ok(Self::make(source, m.target(), LinMapKind::Hom(m.clone())))
    }

    /// Algebra map without requiring a certificate; used to report on
    /// rejected transition data.
    pub(crate) fn hom_unchecked(source: &Arc<HopfAlgebra<R>>, m: &Arc<Morphism<R>>) -> Self {
        Self::make(source, m.target(), LinMapKind::Hom(m.clone()))
    }

    /// Map given by its values on normal words of the source.
    pub fn table(
        source: &Arc<HopfAlgebra<R>>,
        target: &Arc<Presentation<R>>,
        entries: Vec<(Word, Element<R>)>,
    ) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (w, e) in entries {
            if !source.algebra().is_irreducible(&w) {
                return Err(Error::IncompatibleMaps(format!(
                    "table key `{}` is not a normal word",
                    source.word_string(&w)
                )));
            }
            if !Arc::ptr_eq(e.presentation(), target) {
                return Err(Error::PresentationMismatch {
                    left: target.name().to_string(),
                    right: e.presentation().name().to_string(),
                });
            }
            if !e.is_zero() {
                table.insert(w, e);
            }
        }
        Ok(Self::make(source, target, LinMapKind::Table(table)))
    }

    fn compatible(f: &LinMap<R>, g: &LinMap<R>) -> Result<()> {
        if !Arc::ptr_eq(&f.0.source, &g.0.source) || !Arc::ptr_eq(&f.0.target, &g.0.target) {
            return Err(Error::IncompatibleMaps(format!("{f} and {g}")));
        }
        Ok(())
    }

    pub fn convolve(f: &LinMap<R>, g: &LinMap<R>) -> Result<Self> {
        Self::compatible(f, g)?;
        Ok(Self::make(&f.0.source, &f.0.target, LinMapKind::Convolve(f.clone(), g.clone())))
    }

    pub fn convolve_opposite(f: &LinMap<R>, g: &LinMap<R>) -> Result<Self> {
        Self::compatible(f, g)?;
        Ok(Self::make(&f.0.source, &f.0.target, LinMapKind::ConvolveOpposite(f.clone(), g.clone())))
    }

    /// `n`-fold convolution power. With `inverse_via_antipode` the result is
    /// `(f o S)^{*n}`, the convolution inverse of `f^{*n}` whenever `f` is an
    /// algebra map (or the identity).
    pub fn conv_power(f: &LinMap<R>, n: i64, inverse_via_antipode: bool) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidPower(n));
        }
        let base = if inverse_via_antipode { f.precompose(Antipode::S)? } else { f.clone() };
        if n == 1 {
            return Ok(base);
        }
        Ok(Self::make(&f.0.source, &f.0.target, LinMapKind::ConvPower(base, n as u32)))
    }

    pub fn precompose(&self, s: Antipode) -> Result<Self> {
        if s == Antipode::SInv && !self.0.source.has_antipode_inv() {
            return Err(Error::MissingAntipodeInverse(self.0.source.name().to_string()));
        }
        Ok(Self::make(&self.0.source, &self.0.target, LinMapKind::Precompose(self.clone(), s)))
    }

    pub fn source(&self) -> &Arc<HopfAlgebra<R>> {
        &self.0.source
    }

    pub fn target(&self) -> &Arc<Presentation<R>> {
        &self.0.target
    }

    pub fn kind(&self) -> &LinMapKind<R> {
        &self.0.kind
    }

    pub fn ptr_eq(&self, other: &LinMap<R>) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Value on a normal word of the source.
    pub fn eval_word(&self, w: &Word) -> Element<R> {
        if let Some(v) = self.0.memo.get(w) {
            return v;
        }
        let h = &self.0.source;
        let t = &self.0.target;
        let v = match &self.0.kind {
            LinMapKind::Counit => Element::scalar(t, h.counit_word(w)),
            LinMapKind::Identity => Element::from_word(t, w, R::one()),
            LinMapKind::Hom(m) => m.map_word(w),
            LinMapKind::Table(table) => table.get(w).cloned().unwrap_or_else(|| Element::zero(t)),
            LinMapKind::Convolve(f, g) | LinMapKind::ConvolveOpposite(f, g) => {
                let opposite = matches!(self.0.kind, LinMapKind::ConvolveOpposite(..));
                let mut out = Element::zero(t);
                for (legs, c) in h.iterated_word(w, 1).terms() {
                    let (a, b) = if opposite { (&legs[1], &legs[0]) } else { (&legs[0], &legs[1]) };
                    out = &out + &(&f.eval_word(a) * &g.eval_word(b)).scale(c);
                }
                out
            }
            LinMapKind::ConvPower(f, n) => {
                let mut out = Element::zero(t);
                for (legs, c) in h.iterated_word(w, *n as usize - 1).terms() {
                    let mut prod = Element::scalar(t, c.clone());
                    for leg in legs {
                        if prod.is_zero() {
                            break;
                        }
                        prod = &prod * &f.eval_word(leg);
                    }
                    out = &out + &prod;
                }
                out
            }
            LinMapKind::Precompose(f, s) => {
                let e = match s {
                    Antipode::S => h.antipode_word(w),
                    Antipode::SInv => h.antipode_inv_word(w).expect("checked at construction"),
                };
                f.eval(&e)
            }
        };
        self.0.memo.insert(w.clone(), v.clone());
        v
    }

    /// Linear extension to arbitrary elements of the source.
    pub fn eval(&self, h: &Element<R>) -> Element<R> {
        let mut out = Element::zero(&self.0.target);
        for (w, c) in h.terms() {
            out = &out + &self.eval_word(w).scale(c);
        }
        out
    }

    /// Value on the unit.
    pub fn unit_value(&self) -> Element<R> {
        self.eval_word(&Word::empty())
    }

    /// True when this map is an algebra map: a morphism, the identity or a
    /// convolution power of one composed with the antipode into a
    /// commutative setting. Used to pick default convolution inverses.
    pub fn is_hom_like(&self) -> bool {
        matches!(self.0.kind, LinMapKind::Hom(_) | LinMapKind::Identity | LinMapKind::Counit)
    }

    /// Convolution inverse built from the antipode when the constructor
    /// tree allows it: `f o S` for algebra maps, `(f o S)^{*n}` for powers
    /// of algebra maps, and `g^-1 * f^-1` for products.
    pub fn default_inverse(&self) -> Option<LinMap<R>> {
        match &self.0.kind {
            LinMapKind::Counit => Some(self.clone()),
            LinMapKind::Hom(_) | LinMapKind::Identity => self.precompose(Antipode::S).ok(),
            LinMapKind::ConvPower(f, n) if f.is_hom_like() => LinMap::conv_power(f, *n as i64, true).ok(),
            LinMapKind::Convolve(f, g) => {
                LinMap::convolve(&g.default_inverse()?, &f.default_inverse()?).ok()
            }
            _ => None,
        }
    }
}

impl<R: Coeff> fmt::Display for LinMap<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            LinMapKind::Counit => write!(f, "counit"),
            LinMapKind::Identity => write!(f, "id"),
            LinMapKind::Hom(m) => write!(f, "hom({})", m.name()),
            LinMapKind::Table(t) => {
                write!(f, "table {{ ")?;
                let src = &self.0.source;
                let entries: Vec<String> =
                    t.iter().map(|(w, e)| format!("{}: {}", src.word_string(w), e)).collect();
                write!(f, "{}", entries.join("; "))?;
                write!(f, " }}")
            }
            LinMapKind::Convolve(a, b) => write!(f, "conv({a}, {b})"),
            LinMapKind::ConvolveOpposite(a, b) => write!(f, "conv_op({a}, {b})"),
            LinMapKind::ConvPower(a, n) => write!(f, "convpow({a}, {n})"),
            LinMapKind::Precompose(a, Antipode::S) => write!(f, "compose_S({a})"),
            LinMapKind::Precompose(a, Antipode::SInv) => write!(f, "compose_Sinv({a})"),
        }
    }
}

impl<R: Coeff> fmt::Debug for LinMap<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinMap({self}: {} -> {})", self.0.source.name(), self.0.target.name())
    }
}

/// Which of the two convolution identities to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseSide {
    Both,
    Left,
    Right,
}

/// First normal word `h` of degree `<= degree` where `sum f(h_1) g(h_2)`
/// (or `sum f(h_2) g(h_1)` when `twisted`) differs from `e(h) 1`.
pub fn conv_inverse_witness<R: Coeff>(
    f: &LinMap<R>,
    g: &LinMap<R>,
    degree: usize,
    side: InverseSide,
    twisted: bool,
) -> Result<Option<Witness>> {
    let fg = if twisted { LinMap::convolve_opposite(f, g)? } else { LinMap::convolve(f, g)? };
    let gf = if twisted { LinMap::convolve_opposite(g, f)? } else { LinMap::convolve(g, f)? };
    let unit = LinMap::counit(f.source(), f.target());
    let mut maps = Vec::new();
    if side != InverseSide::Right {
        maps.push(("f*g", fg));
    }
    if side != InverseSide::Left {
        maps.push(("g*f", gf));
    }
    let basis = f.source().basis(degree);
    Ok(first_witness(&basis, |w| {
        maps.iter().find_map(|(label, m)| {
            let got = m.eval_word(w);
            let expect = unit.eval_word(w);
            (got != expect).then(|| Witness::new(format!("{label} on {}", f.source().word_string(w)), &got, &expect))
        })
    }))
}

/// Report record for [`conv_inverse_witness`].
pub fn check_conv_inverse<R: Coeff>(
    f: &LinMap<R>,
    g: &LinMap<R>,
    degree: usize,
    side: InverseSide,
    twisted: bool,
) -> CheckRecord {
    let anchor = if twisted { "convolution.inverse-twisted" } else { "convolution.inverse" };
    let name = format!("convolution inverse {f} / {g}");
    check(name, anchor, || match conv_inverse_witness(f, g, degree, side, twisted) {
        Err(e) => Outcome::Fail(Witness::new("maps", f, g), e.to_string()),
        Ok(w) => Outcome::from_witness(
            w,
            format!("words up to degree {degree}"),
            "convolution product differs from the unit",
        ),
    })
}
