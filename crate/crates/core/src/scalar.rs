//! Coefficient rings.
//!
//! Every algebra in the crate is generic over a [`Coeff`] type. The default
//! coefficient is [`Laurent`]`<BigRational>`: an exact Laurent polynomial in
//! named deformation parameters (`q`, `nu`, ...) with rational coefficients.
//! Identities that hold "for all q" are then a single exact comparison.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

/// Scalar ring used for all coefficients.
///
/// The bounds come from `num-traits` plus owned ring operations. Equality is
/// exact for the rational and Laurent instances; for `f64` it is bitwise float
/// equality and only meaningful for well-conditioned specializations.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Multiplicative inverse when the value is a unit of the ring.
    fn try_inverse(&self) -> Option<Self>;

    fn from_integer(n: i64) -> Self;

    /// Used only for pretty printing signs.
    fn is_negative(&self) -> bool {
        false
    }

    fn is_unit(&self) -> bool {
        self.try_inverse().is_some()
    }

    /// A sum of several terms; printed in parentheses when used as a factor.
    fn is_compound(&self) -> bool {
        false
    }
}

impl Coeff for BigRational {
    fn try_inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_integer(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl Coeff for Rational64 {
    fn try_inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_integer(n: i64) -> Self {
        Rational64::from_integer(n)
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl Coeff for f64 {
    fn try_inverse(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }

    fn from_integer(n: i64) -> Self {
        n as f64
    }

    fn is_negative(&self) -> bool {
        *self < 0.0
    }
}

/// Integer power of a coefficient; negative exponents need a unit.
pub fn coeff_pow<C: Coeff>(base: &C, exp: i32) -> Option<C> {
    let b = if exp < 0 { base.try_inverse()? } else { base.clone() };
    let mut acc = C::one();
    for _ in 0..exp.unsigned_abs() {
        acc = acc * b.clone();
    }
    Some(acc)
}

/// A monomial `q^a nu^b ...` in the deformation parameters.
///
/// Stored as `(name, exponent)` pairs sorted by name with no zero exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Arc<str>, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn param(name: &str, exp: i32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(Arc::from(name), exp)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[(Arc<str>, i32)] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Monomial(self.0.iter().map(|(n, e)| (n.clone(), -e)).collect())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (&self.0[i], &other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a.1 + b.1;
                    if e != 0 {
                        out.push((a.0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }
}

impl Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (name, exp)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            if *exp == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{exp}")?;
            }
        }
        Ok(())
    }
}

impl Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(self, f)
    }
}

/// Laurent polynomial in named parameters with coefficients in `C`.
#[derive(Clone, PartialEq)]
pub struct Laurent<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Laurent<C> {
    pub fn constant(c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Laurent { terms }
    }

    /// `name^exp`.
    pub fn param(name: &str, exp: i32) -> Self {
        Self::term(Monomial::param(name, exp), C::one())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Laurent { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when no parameter occurs.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn params(&self) -> BTreeSet<Arc<str>> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(n, _)| n.clone()))
            .collect()
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Substitutes the given parameters by values; other parameters stay
    /// symbolic. Negative powers of a non-invertible value yield `None`.
    pub fn specialize(&self, values: &BTreeMap<String, C>) -> Option<Self> {
        let mut out = Laurent::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for (name, exp) in &m.0 {
                match values.get(name.as_ref()) {
                    Some(v) => coeff = coeff * coeff_pow(v, *exp)?,
                    None => rest.push((name.clone(), *exp)),
                }
            }
            out.add_term(Monomial(rest), coeff);
        }
        Some(out)
    }

    /// Full evaluation; `None` if a parameter is missing or a negative power
    /// hits a non-unit.
    pub fn evaluate(&self, values: &BTreeMap<String, C>) -> Option<C> {
        self.specialize(values)?.as_constant()
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Laurent<D> {
        let mut out = Laurent::<D>::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

impl<C: Coeff> Zero for Laurent<C> {
    fn zero() -> Self {
        Laurent { terms: BTreeMap::new() }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Coeff> One for Laurent<C> {
    fn one() -> Self {
        Laurent::constant(C::one())
    }
}

impl<C: Coeff> Add for Laurent<C> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<C: Coeff> Sub for Laurent<C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<C: Coeff> Neg for Laurent<C> {
    type Output = Self;
    fn neg(self) -> Self {
        Laurent {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl<C: Coeff> Mul for Laurent<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<C: Coeff> Mul<&Laurent<C>> for &Laurent<C> {
    type Output = Laurent<C>;
    fn mul(self, rhs: &Laurent<C>) -> Laurent<C> {
        let mut out = Laurent::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Coeff for Laurent<C> {
    fn try_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        Some(Laurent::term(m.inverse(), c.try_inverse()?))
    }

    fn from_integer(n: i64) -> Self {
        Laurent::constant(C::from_integer(n))
    }

    fn is_negative(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().all(|c| c.is_negative())
    }

    fn is_compound(&self) -> bool {
        self.terms.len() > 1 || self.terms.values().any(|c| c.is_compound())
    }
}

impl<C: Coeff> Display for Laurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs} {m}")?;
            }
        }
        Ok(())
    }
}

impl<C: Coeff> Debug for Laurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(self, f)
    }
}

/// Parses a rational literal such as `3`, `-2` or `7/5`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => Some(BigRational::from_integer(text.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = Laurent<BigRational>;

    fn q(e: i32) -> S {
        S::param("q", e)
    }

    #[test]
    fn parameter_powers_cancel() {
        assert_eq!(q(1) * q(-1), S::one());
        assert_eq!(q(2) * S::param("nu", -1) * q(-2) * S::param("nu", 1), S::one());
    }

    #[test]
    fn no_zero_terms_are_stored() {
        let s = q(1) + S::one() - q(1);
        assert_eq!(s.len(), 1);
        assert!((q(1) - q(1)).is_zero());
    }

    #[test]
    fn only_single_terms_are_units() {
        assert_eq!(q(3).try_inverse(), Some(q(-3)));
        assert!((S::one() + q(1)).try_inverse().is_none());
        assert!(S::zero().try_inverse().is_none());
    }

    #[test]
    fn specialization_and_evaluation() {
        let s = q(-1) * S::from_integer(2) + S::param("nu", 2);
        let mut vals = BTreeMap::new();
        vals.insert("q".to_string(), BigRational::from_integer(2.into()));
        let partial = s.specialize(&vals).unwrap();
        assert_eq!(partial, S::one() + S::param("nu", 2));
        vals.insert("nu".to_string(), BigRational::from_integer(3.into()));
        assert_eq!(s.evaluate(&vals), Some(BigRational::from_integer(10.into())));
        vals.insert("q".to_string(), BigRational::zero());
        assert_eq!(s.evaluate(&vals), None);
    }

    #[test]
    fn display_is_readable() {
        let s = S::one() - S::param("nu", -2);
        assert_eq!(s.to_string(), "1 - nu^-2");
        assert_eq!((-q(1)).to_string(), "-q");
        let half = S::constant(BigRational::new(1.into(), 2.into())) * q(-1);
        assert_eq!(half.to_string(), "1/2 q^-1");
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("7/5"), Some(BigRational::new(7.into(), 5.into())));
        assert_eq!(parse_rational("-3"), Some(BigRational::from_integer((-3).into())));
        assert_eq!(parse_rational("1/0"), None);
    }
}
