//! Universal differential forms over presented algebras, local connection
//! forms, their gauge transformation and curvature.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::bundle::act_on_chart;
use crate::error::{Error, Result};
use crate::gauge::{GaugeFamily, Side};
use crate::hopf::{HopfAlgebra, LinMap, TensorElement};
use crate::linalg::{solve, Solution};
use crate::memo::Memo;
use crate::ncpoly::{add_into, write_term, Element, Presentation, Word};
use crate::report::{check, first_witness, Outcome, Report, Witness, NOTE_CURVATURE, NOTE_DEGREE};
use crate::scalar::Coeff;

/// Universal `n`-form: a sum of `a_0 d(a_1) ... d(a_n)`, stored as the
/// tensor `a_0 (x) a_1 (x) ... (x) a_n` of normal words. The barred slots
/// never hold the empty word, since `d(1) = 0`.
#[derive(Clone)]
pub struct Form<R> {
    algebra: Arc<Presentation<R>>,
    degree: usize,
    terms: BTreeMap<Vec<Word>, R>,
}

/// `(key) * b` for a single term `key` and a normal word `b`, using
/// `(w d(a)) b = w d(a b) - (w a) d(b)` recursively.
fn times_word<R: Coeff>(p: &Presentation<R>, key: &[Word], b: &Word, c: R, out: &mut BTreeMap<Vec<Word>, R>) {
    if b.is_empty() {
        add_into(out, key.to_vec(), c);
        return;
    }
    let n = key.len() - 1;
    if n == 0 {
        for (w, d) in p.nf(&key[0].concat(b)).iter() {
            add_into(out, vec![w.clone()], c.clone() * d.clone());
        }
        return;
    }
    for (w, d) in p.nf(&key[n].concat(b)).iter() {
        if w.is_empty() {
            continue;
        }
        let mut k = key[..n].to_vec();
        k.push(w.clone());
        add_into(out, k, c.clone() * d.clone());
    }
    let mut inner = BTreeMap::new();
    times_word(p, &key[..n], &key[n], R::one(), &mut inner);
    for (mut k, d) in inner {
        k.push(b.clone());
        add_into(out, k, -(c.clone() * d));
    }
}

impl<R: Coeff> Form<R> {
    pub fn zero(p: &Arc<Presentation<R>>, degree: usize) -> Self {
        Form { algebra: p.clone(), degree, terms: BTreeMap::new() }
    }

    /// The 0-form `a`.
    pub fn function(a: &Element<R>) -> Self {
        let terms = a.terms().iter().map(|(w, c)| (vec![w.clone()], c.clone())).collect();
        Form { algebra: a.presentation().clone(), degree: 0, terms }
    }

    /// `d(a)`.
    pub fn exact(a: &Element<R>) -> Self {
        Self::function(a).d()
    }

    pub fn algebra(&self) -> &Arc<Presentation<R>> {
        &self.algebra
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Word>, R> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Universal differential: `d(a_0 d(a_1) ...) = d(a_0) d(a_1) ...`.
    pub fn d(&self) -> Self {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            if k[0].is_empty() {
                continue;
            }
            let mut key = Vec::with_capacity(k.len() + 1);
            key.push(Word::empty());
            key.extend(k.iter().cloned());
            add_into(&mut terms, key, c.clone());
        }
        Form { algebra: self.algebra.clone(), degree: self.degree + 1, terms }
    }

    fn same_base(&self, other: &Form<R>) -> Result<()> {
        if !Arc::ptr_eq(&self.algebra, &other.algebra) {
            return Err(Error::PresentationMismatch {
                left: self.algebra.name().to_string(),
                right: other.algebra.name().to_string(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Form<R>) -> Result<Self> {
        self.same_base(other)?;
        if self.degree != other.degree {
            return Err(Error::Unsupported(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            add_into(&mut terms, k.clone(), c.clone());
        }
        Ok(Form { algebra: self.algebra.clone(), degree: self.degree, terms })
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut terms = BTreeMap::new();
        for (k, d) in &self.terms {
            add_into(&mut terms, k.clone(), c.clone() * d.clone());
        }
        Form { algebra: self.algebra.clone(), degree: self.degree, terms }
    }

    /// Product in the universal differential algebra.
    pub fn try_mul(&self, other: &Form<R>) -> Result<Self> {
        self.same_base(other)?;
        let p = &*self.algebra;
        let mut terms = BTreeMap::new();
        for (u, c) in &self.terms {
            for (v, d) in &other.terms {
                let mut part = BTreeMap::new();
                times_word(p, u, &v[0], c.clone() * d.clone(), &mut part);
                for (mut k, e) in part {
                    k.extend(v[1..].iter().cloned());
                    add_into(&mut terms, k, e);
                }
            }
        }
        Ok(Form { algebra: self.algebra.clone(), degree: self.degree + other.degree, terms })
    }

    /// `a * self`.
    pub fn left_mul(&self, a: &Element<R>) -> Result<Self> {
        Form::function(a).try_mul(self)
    }

    /// `self * a`.
    pub fn right_mul(&self, a: &Element<R>) -> Result<Self> {
        self.try_mul(&Form::function(a))
    }
}

impl<R: Coeff> PartialEq for Form<R> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) && self.degree == other.degree && self.terms == other.terms
    }
}

impl<R: Coeff> fmt::Display for Form<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let p = &self.algebra;
        let mut out = String::new();
        for (k, (key, c)) in self.terms.iter().enumerate() {
            let mut parts = Vec::new();
            if !key[0].is_empty() || key.len() == 1 {
                parts.push(p.word_string(&key[0]));
            }
            parts.extend(key[1..].iter().map(|w| format!("d({})", p.word_string(w))));
            write_term(&mut out, k == 0, c, &parts.join(" "));
        }
        f.write_str(&out)
    }
}

impl<R: Coeff> fmt::Debug for Form<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}[{}]", self.algebra.name(), self.degree, self)
    }
}

impl<R: Coeff> Add for &Form<R> {
    type Output = Form<R>;
    fn add(self, rhs: &Form<R>) -> Form<R> {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<R: Coeff> Sub for &Form<R> {
    type Output = Form<R>;
    fn sub(self, rhs: &Form<R>) -> Form<R> {
        self.try_add(&-rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<R: Coeff> Neg for &Form<R> {
    type Output = Form<R>;
    fn neg(self) -> Form<R> {
        self.scale(&-R::one())
    }
}

impl<R: Coeff> Mul for &Form<R> {
    type Output = Form<R>;
    fn mul(self, rhs: &Form<R>) -> Form<R> {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

/// Convolution-invertible map `tau: H -> B` acting on one chart, with its
/// inverse and the side it acts from.
#[derive(Clone)]
pub struct LocalGauge<R> {
    pub side: Side,
    pub tau: LinMap<R>,
    pub tau_inv: LinMap<R>,
}

impl<R: Coeff> fmt::Debug for LocalGauge<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocalGauge({}, {}, {})", self.side, self.tau, self.tau_inv)
    }
}

impl<R: Coeff> LocalGauge<R> {
    pub fn new(side: Side, tau: LinMap<R>, tau_inv: LinMap<R>) -> Result<Self> {
        if !Arc::ptr_eq(tau.source(), tau_inv.source()) || !Arc::ptr_eq(tau.target(), tau_inv.target()) {
            return Err(Error::IncompatibleMaps(format!("{tau} and {tau_inv}")));
        }
        Ok(LocalGauge { side, tau, tau_inv })
    }

    /// Chart `i` of a gauge family.
    pub fn from_family(family: &GaugeFamily<R>, i: usize) -> Self {
        LocalGauge { side: family.side(), tau: family.tau(i).clone(), tau_inv: family.tau_inv(i).clone() }
    }

    /// `tau = e 1`.
    pub fn identity(fibre: &Arc<HopfAlgebra<R>>, algebra: &Arc<Presentation<R>>, side: Side) -> Self {
        let e = LinMap::counit(fibre, algebra);
        LocalGauge { side, tau: e.clone(), tau_inv: e }
    }

    /// Transformation by `self` followed by `then`: `tau * sigma` on the
    /// left, the opposite convolution on the right.
    pub fn then(&self, then: &LocalGauge<R>) -> Result<Self> {
        if self.side != then.side {
            return Err(Error::SideMismatch);
        }
        let (tau, tau_inv) = match self.side {
            Side::Left => (LinMap::convolve(&self.tau, &then.tau)?, LinMap::convolve(&then.tau_inv, &self.tau_inv)?),
            Side::Right => (
                LinMap::convolve_opposite(&self.tau, &then.tau)?,
                LinMap::convolve_opposite(&then.tau_inv, &self.tau_inv)?,
            ),
        };
        Ok(LocalGauge { side: self.side, tau, tau_inv })
    }

    /// `sum tau^-1(h_1) w(h_2) tau(h_3)` on the left,
    /// `sum tau(h_3) w(h_2) tau^-1(h_1)` on the right.
    fn conjugate(&self, w: &Word, mut value: impl FnMut(&Word) -> Form<R>, degree: usize) -> Form<R> {
        let h = self.tau.source();
        let mut out = Form::zero(self.tau.target(), degree);
        for (legs, c) in h.iterated_word(w, 2).terms() {
            let mid = value(&legs[1]);
            if mid.is_zero() {
                continue;
            }
            let (l, r) = match self.side {
                Side::Left => (self.tau_inv.eval_word(&legs[0]), self.tau.eval_word(&legs[2])),
                Side::Right => (self.tau.eval_word(&legs[2]), self.tau_inv.eval_word(&legs[0])),
            };
            if l.is_zero() || r.is_zero() {
                continue;
            }
            let term = mid.left_mul(&l).and_then(|m| m.right_mul(&r)).expect("same chart algebra");
            out = &out + &term.scale(c);
        }
        out
    }

    /// Inhomogeneous term: `sum tau^-1(h_1) d tau(h_2)` on the left,
    /// `-sum tau(h_2) d tau^-1(h_1)` on the right.
    pub fn pure_gauge(&self, w: &Word) -> Form<R> {
        let h = self.tau.source();
        let mut out = Form::zero(self.tau.target(), 1);
        for (legs, c) in h.iterated_word(w, 1).terms() {
            let (a, b, sign) = match self.side {
                Side::Left => (self.tau_inv.eval_word(&legs[0]), self.tau.eval_word(&legs[1]), R::one()),
                Side::Right => (self.tau.eval_word(&legs[1]), self.tau_inv.eval_word(&legs[0]), -R::one()),
            };
            if a.is_zero() {
                continue;
            }
            let term = Form::exact(&b).left_mul(&a).expect("same chart algebra");
            out = &out + &term.scale(&(sign * c.clone()));
        }
        out
    }

    /// Chart action on `b (x) h`: `sum b tau(h_1) (x) h_2` on the left,
    /// `sum tau(h_1) b (x) h_2` on the right.
    pub fn act(&self, t: &TensorElement<R>) -> TensorElement<R> {
        act_on_chart(self.tau.source(), t, &self.tau, self.side == Side::Right)
    }

    fn act_horizontal(&self, x: &LocalHorizontal<R>) -> LocalHorizontal<R> {
        let h = self.tau.source();
        let mut out = LocalHorizontal::zero(&x.algebra, h, x.degree);
        for (w, form) in &x.terms {
            for (legs, c) in h.iterated_word(w, 1).terms() {
                let t = self.tau.eval_word(&legs[0]);
                if t.is_zero() {
                    continue;
                }
                let f = match self.side {
                    Side::Left => form.right_mul(&t),
                    Side::Right => form.left_mul(&t),
                }
                .expect("same chart algebra");
                out.add(&legs[1], &f.scale(c));
            }
        }
        out
    }
}

enum ConnectionKind<R> {
    Table(BTreeMap<Word, Form<R>>),
    Transformed { base: ConnectionForm<R>, gauge: LocalGauge<R> },
}

struct ConnectionInner<R> {
    name: String,
    side: Side,
    fibre: Arc<HopfAlgebra<R>>,
    algebra: Arc<Presentation<R>>,
    kind: ConnectionKind<R>,
    memo: Memo<Word, Form<R>>,
}

/// Local connection form `A: H -> Omega^1(B)` with `A(1) = 0`.
pub struct ConnectionForm<R>(Arc<ConnectionInner<R>>);

impl<R> Clone for ConnectionForm<R> {
    fn clone(&self) -> Self {
        ConnectionForm(self.0.clone())
    }
}

impl<R: Coeff> fmt::Debug for ConnectionForm<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConnectionForm({}, {})", self.0.name, self.0.side)
    }
}

impl<R: Coeff> ConnectionForm<R> {
    /// Connection given by its values on normal words of `H`; zero elsewhere.
    pub fn table(
        name: &str,
        side: Side,
        fibre: &Arc<HopfAlgebra<R>>,
        algebra: &Arc<Presentation<R>>,
        entries: Vec<(Word, Form<R>)>,
    ) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (w, f) in entries {
            if !fibre.algebra().is_irreducible(&w) {
                return Err(Error::Unsupported(format!(
                    "connection key `{}` is not a normal word",
                    fibre.word_string(&w)
                )));
            }
            if !Arc::ptr_eq(f.algebra(), algebra) {
                return Err(Error::PresentationMismatch {
                    left: algebra.name().to_string(),
                    right: f.algebra().name().to_string(),
                });
            }
            if f.degree() != 1 {
                return Err(Error::Unsupported(format!("connection values must be 1-forms, got degree {}", f.degree())));
            }
            if w.is_empty() && !f.is_zero() {
                return Err(Error::Unsupported(format!("connection `{name}` has A(1) = {f}, expected 0")));
            }
            if !f.is_zero() {
                table.insert(w, f);
            }
        }
        Ok(Self::make(name, side, fibre, algebra, ConnectionKind::Table(table)))
    }

    pub fn zero(name: &str, side: Side, fibre: &Arc<HopfAlgebra<R>>, algebra: &Arc<Presentation<R>>) -> Self {
        Self::make(name, side, fibre, algebra, ConnectionKind::Table(BTreeMap::new()))
    }

    fn make(
        name: &str,
        side: Side,
        fibre: &Arc<HopfAlgebra<R>>,
        algebra: &Arc<Presentation<R>>,
        kind: ConnectionKind<R>,
    ) -> Self {
        ConnectionForm(Arc::new(ConnectionInner {
            name: name.to_string(),
            side,
            fibre: fibre.clone(),
            algebra: algebra.clone(),
            kind,
            memo: Memo::new(),
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn side(&self) -> Side {
        self.0.side
    }

    pub fn fibre(&self) -> &Arc<HopfAlgebra<R>> {
        &self.0.fibre
    }

    pub fn algebra(&self) -> &Arc<Presentation<R>> {
        &self.0.algebra
    }

    /// Nonzero values of a connection given by a table.
    pub fn table_entries(&self) -> Option<&BTreeMap<Word, Form<R>>> {
        match &self.0.kind {
            ConnectionKind::Table(t) => Some(t),
            ConnectionKind::Transformed { .. } => None,
        }
    }

    pub fn eval_word(&self, w: &Word) -> Form<R> {
        self.0.memo.get_or_insert_with(w, || match &self.0.kind {
            ConnectionKind::Table(t) => t.get(w).cloned().unwrap_or_else(|| Form::zero(&self.0.algebra, 1)),
            ConnectionKind::Transformed { base, gauge } => {
                let hom = gauge.conjugate(w, |u| base.eval_word(u), 1);
                &hom + &gauge.pure_gauge(w)
            }
        })
    }

    pub fn eval(&self, h: &Element<R>) -> Form<R> {
        let mut out = Form::zero(&self.0.algebra, 1);
        for (w, c) in h.terms() {
            out = &out + &self.eval_word(w).scale(c);
        }
        out
    }
}

/// Gauge transform of a connection: on the left
/// `A'(h) = sum tau^-1(h_1) A(h_2) tau(h_3) + sum tau^-1(h_1) d tau(h_2)`,
/// on the right `A'(h) = sum tau(h_3) A(h_2) tau^-1(h_1) - sum tau(h_2) d tau^-1(h_1)`.
pub fn gauge_transform_connection<R: Coeff>(a: &ConnectionForm<R>, gauge: &LocalGauge<R>) -> Result<ConnectionForm<R>> {
    if a.side() != gauge.side {
        return Err(Error::SideMismatch);
    }
    if !Arc::ptr_eq(gauge.tau.source(), a.fibre()) || !Arc::ptr_eq(gauge.tau.target(), a.algebra()) {
        return Err(Error::IncompatibleMaps(format!("{} does not act on `{}`", gauge.tau, a.name())));
    }
    let name = format!("{}'", a.name());
    let kind = ConnectionKind::Transformed { base: a.clone(), gauge: gauge.clone() };
    Ok(ConnectionForm::make(&name, a.side(), a.fibre(), a.algebra(), kind))
}

/// Local curvature of a connection: `F(h) = dA(h) + sum A(h_1) A(h_2)` on the
/// left, `F(h) = dA(h) - sum A(h_2) A(h_1)` on the right.
#[derive(Clone)]
pub struct Curvature<R> {
    connection: ConnectionForm<R>,
}

impl<R: Coeff> fmt::Debug for Curvature<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Curvature({})", self.connection.name())
    }
}

pub fn curvature<R: Coeff>(a: &ConnectionForm<R>) -> Curvature<R> {
    Curvature { connection: a.clone() }
}

impl<R: Coeff> Curvature<R> {
    pub fn connection(&self) -> &ConnectionForm<R> {
        &self.connection
    }

    pub fn eval_word(&self, w: &Word) -> Form<R> {
        let a = &self.connection;
        let mut out = a.eval_word(w).d();
        for (legs, c) in a.fibre().iterated_word(w, 1).terms() {
            let (x, y) = (a.eval_word(&legs[0]), a.eval_word(&legs[1]));
            if x.is_zero() || y.is_zero() {
                continue;
            }
            out = match a.side() {
                Side::Left => &out + &(&x * &y).scale(c),
                Side::Right => &out - &(&y * &x).scale(c),
            };
        }
        out
    }
}

/// Chart element of `Omega(B) (x) H`, stored by fibre word.
#[derive(Clone)]
pub struct LocalHorizontal<R> {
    algebra: Arc<Presentation<R>>,
    fibre: Arc<HopfAlgebra<R>>,
    degree: usize,
    terms: BTreeMap<Word, Form<R>>,
}

impl<R: Coeff> LocalHorizontal<R> {
    pub fn zero(algebra: &Arc<Presentation<R>>, fibre: &Arc<HopfAlgebra<R>>, degree: usize) -> Self {
        LocalHorizontal { algebra: algebra.clone(), fibre: fibre.clone(), degree, terms: BTreeMap::new() }
    }

    fn add(&mut self, h: &Word, f: &Form<R>) {
        if f.is_zero() {
            return;
        }
        let sum = match self.terms.remove(h) {
            Some(old) => &old + f,
            None => f.clone(),
        };
        if !sum.is_zero() {
            self.terms.insert(h.clone(), sum);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Word, Form<R>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<R: Coeff> PartialEq for LocalHorizontal<R> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) && self.degree == other.degree && self.terms == other.terms
    }
}

impl<R: Coeff> fmt::Display for LocalHorizontal<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(w, form)| format!("({form}) (x) {}", self.fibre.word_string(w))).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl<R: Coeff> fmt::Debug for LocalHorizontal<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `D(b (x) h) = db (x) h - sum b A(h_1) (x) h_2` on the left and
/// `D(b (x) h) = db (x) h - sum A(h_1) b (x) h_2` on the right, for a
/// two-slot chart tensor `t` over (chart algebra, fibre).
pub fn local_covariant_derivative<R: Coeff>(a: &ConnectionForm<R>, t: &TensorElement<R>) -> LocalHorizontal<R> {
    let fibre = a.fibre();
    let p = a.algebra();
    let mut out = LocalHorizontal::zero(p, fibre, 1);
    for (ws, c) in t.terms() {
        let b = Element::from_word(p, &ws[0], c.clone());
        out.add(&ws[1], &Form::exact(&b));
        for (legs, d) in fibre.iterated_word(&ws[1], 1).terms() {
            let form = a.eval_word(&legs[0]);
            if form.is_zero() {
                continue;
            }
            let f = match a.side() {
                Side::Left => form.left_mul(&b),
                Side::Right => form.right_mul(&b),
            }
            .expect("same chart algebra");
            out.add(&legs[1], &f.scale(&-d.clone()));
        }
    }
    out
}

fn unital_record<R: Coeff>(a: &ConnectionForm<R>) -> crate::report::CheckRecord {
    check(format!("{}: A(1) = 0", a.name()), "connection.unital", || {
        let v = a.eval_word(&Word::empty());
        Outcome::from_witness((!v.is_zero()).then(|| Witness::new("1", &v, "0")), "A(1) = 0", "A(1) != 0")
    })
}

/// Checks that the transformed connection is a connection and that its
/// curvature transforms homogeneously:
/// `F'(h) = sum tau^-1(h_1) F(h_2) tau(h_3)` on the left,
/// `F'(h) = sum tau(h_3) F(h_2) tau^-1(h_1)` on the right.
/// On the left it also checks `D' o alpha = alpha o D` on chart tensors.
pub fn check_curvature_covariance<R: Coeff>(a: &ConnectionForm<R>, gauge: &LocalGauge<R>, degree: usize) -> Report {
    let mut report = Report::new();
    report.note(NOTE_CURVATURE);
    report.note(NOTE_DEGREE);
    let transformed = match gauge_transform_connection(a, gauge) {
        Ok(t) => t,
        Err(e) => {
            report.push(check(format!("{}: gauge transform", a.name()), "connection.transform", || {
                Outcome::Fail(Witness::new(a.name(), e, ""), "connection and gauge do not match".into())
            }));
            return report;
        }
    };
    let fibre = a.fibre();
    let words = fibre.basis(degree);
    report.push(unital_record(&transformed));
    let f = curvature(a);
    let f2 = curvature(&transformed);
    report.push(check(format!("{}: F(1) = 0", a.name()), "curvature.unital", || {
        let v = f.eval_word(&Word::empty());
        Outcome::from_witness((!v.is_zero()).then(|| Witness::new("1", &v, "0")), "F(1) = 0", "F(1) != 0")
    }));
    let anchor = match a.side() {
        Side::Left => "curvature.covariance-left",
        Side::Right => "curvature.covariance-right",
    };
    report.push(check(format!("{}: curvature covariance", a.name()), anchor, || {
        let w = first_witness(&words, |w| {
            let lhs = f2.eval_word(w);
            let rhs = gauge.conjugate(w, |u| f.eval_word(u), 2);
            (lhs != rhs).then(|| Witness::new(fibre.word_string(w), &lhs, &rhs))
        });
        Outcome::from_witness(w, format!("{} words", words.len()), "F' differs from the conjugated F")
    }));
    if a.side() == Side::Left {
        report.push(check(format!("{}: D' alpha = alpha D", a.name()), "connection.covariant-derivative", || {
            let chart = a.algebra();
            let hp = fibre.algebra();
            let mut pairs = Vec::new();
            for b in chart.normal_words(degree) {
                for h in hp.normal_words(degree - b.len()) {
                    pairs.push((b.clone(), h));
                }
            }
            let w = first_witness(&pairs, |(b, h)| {
                let t = TensorElement::from_words(&[chart.clone(), hp.clone()], vec![b.clone(), h.clone()], R::one());
                let lhs = local_covariant_derivative(&transformed, &gauge.act(&t));
                let rhs = gauge.act_horizontal(&local_covariant_derivative(a, &t));
                (lhs != rhs).then(|| Witness::new(&t, &lhs, &rhs))
            });
            Outcome::from_witness(w, format!("{} chart tensors", pairs.len()), "D' alpha != alpha D")
        }));
    }
    report
}

/// Transforming by `first` and then `second` agrees with transforming by
/// their composite.
pub fn check_connection_cocycle<R: Coeff>(
    a: &ConnectionForm<R>,
    first: &LocalGauge<R>,
    second: &LocalGauge<R>,
    degree: usize,
) -> Report {
    let mut report = Report::new();
    report.note(NOTE_DEGREE);
    report.push(check(format!("{}: transform cocycle", a.name()), "connection.cocycle", || {
        let both = first.then(second).and_then(|c| {
            let once = gauge_transform_connection(a, &c)?;
            let twice = gauge_transform_connection(&gauge_transform_connection(a, first)?, second)?;
            Ok((once, twice))
        });
        let (once, twice) = match both {
            Ok(x) => x,
            Err(e) => return Outcome::Fail(Witness::new(a.name(), e, ""), "gauges do not compose".into()),
        };
        let words = a.fibre().basis(degree);
        let w = first_witness(&words, |w| {
            let (x, y) = (twice.eval_word(w), once.eval_word(w));
            (x != y).then(|| Witness::new(a.fibre().word_string(w), &x, &y))
        });
        Outcome::from_witness(w, format!("{} words", words.len()), "iterated transform differs from the composite")
    }));
    report
}

/// A first-order calculus on a chart algebra in which connection values and
/// the ideal conditions are compared.
#[derive(Clone)]
pub enum FirstOrderCalculus<R> {
    Universal(Arc<Presentation<R>>),
    /// One-forms `b theta` with `theta` central and `db = partial(b) theta`
    /// for a derivation `partial` given on generators.
    Derivation { algebra: Arc<Presentation<R>>, partials: Vec<Element<R>> },
}

/// A one-form of a [`FirstOrderCalculus`].
#[derive(Clone, Debug, PartialEq)]
pub enum OneForm<R: Coeff> {
    Universal(Form<R>),
    /// Coefficient of `theta`.
    Derivation(Element<R>),
}

impl<R: Coeff> fmt::Display for OneForm<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OneForm::Universal(form) => write!(f, "{form}"),
            OneForm::Derivation(b) if b.is_zero() => f.write_str("0"),
            OneForm::Derivation(b) if b.terms().len() == 1 => write!(f, "{b} theta"),
            OneForm::Derivation(b) => write!(f, "({b}) theta"),
        }
    }
}

impl<R: Coeff> fmt::Debug for FirstOrderCalculus<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FirstOrderCalculus::Universal(p) => write!(f, "Universal({})", p.name()),
            FirstOrderCalculus::Derivation { algebra, partials } => write!(f, "Derivation({}, {partials:?})", algebra.name()),
        }
    }
}

impl<R: Coeff> FirstOrderCalculus<R> {
    /// Derivation calculus; generators missing from `partials` map to zero.
    /// Rejects derivations that do not respect the rewrite rules.
    pub fn derivation(algebra: &Arc<Presentation<R>>, partials: Vec<(&str, Element<R>)>) -> Result<Self> {
        let mut table = vec![Element::zero(algebra); algebra.generators().len()];
        for (g, e) in partials {
            let i = algebra.generator(g).ok_or_else(|| Error::UnknownGenerator(g.to_string()))?;
            if !Arc::ptr_eq(e.presentation(), algebra) {
                return Err(Error::PresentationMismatch {
                    left: algebra.name().to_string(),
                    right: e.presentation().name().to_string(),
                });
            }
            table[i as usize] = e;
        }
        let calc = FirstOrderCalculus::Derivation { algebra: algebra.clone(), partials: table };
        for rule in algebra.rules() {
            let lhs = calc.partial_word(&rule.lhs);
            let mut rhs = Element::zero(algebra);
            for (w, c) in &rule.rhs {
                rhs = &rhs + &calc.partial_word(w).scale(c);
            }
            if lhs != rhs {
                return Err(Error::Unsupported(format!(
                    "derivation does not respect `{}`: {lhs} != {rhs}",
                    algebra.word_string(&rule.lhs)
                )));
            }
        }
        Ok(calc)
    }

    pub fn algebra(&self) -> &Arc<Presentation<R>> {
        match self {
            FirstOrderCalculus::Universal(p) | FirstOrderCalculus::Derivation { algebra: p, .. } => p,
        }
    }

    fn partial_word(&self, w: &Word) -> Element<R> {
        let FirstOrderCalculus::Derivation { algebra, partials } = self else {
            unreachable!("only derivation calculi have partials")
        };
        let mut out = Element::zero(algebra);
        let n = w.len();
        for i in 0..n {
            let g = w.letters()[i] as usize;
            if partials[g].is_zero() {
                continue;
            }
            let pre = Element::from_word(algebra, &w.subword(0, i), R::one());
            let post = Element::from_word(algebra, &w.subword(i + 1, n), R::one());
            out = &out + &(&(&pre * &partials[g]) * &post);
        }
        out
    }

    /// Image of a universal one-form under the quotient map.
    pub fn project(&self, f: &Form<R>) -> Result<OneForm<R>> {
        if f.degree() != 1 {
            return Err(Error::Unsupported(format!("expected a 1-form, got degree {}", f.degree())));
        }
        if !Arc::ptr_eq(f.algebra(), self.algebra()) {
            return Err(Error::PresentationMismatch {
                left: self.algebra().name().to_string(),
                right: f.algebra().name().to_string(),
            });
        }
        match self {
            FirstOrderCalculus::Universal(_) => Ok(OneForm::Universal(f.clone())),
            FirstOrderCalculus::Derivation { algebra, .. } => {
                let mut out = Element::zero(algebra);
                for (k, c) in f.terms() {
                    let a0 = Element::from_word(algebra, &k[0], c.clone());
                    out = &out + &(&a0 * &self.partial_word(&k[1]));
                }
                Ok(OneForm::Derivation(out))
            }
        }
    }
}

/// Checks the conditions under which gauge transformations map connections
/// of the calculus defined by the ideal generated by `r_gens` to connections:
/// Ad-invariance of the generators, `sum tau^-1(r_1) d tau(r_2) = 0`
/// (right: `sum tau(r_2) d tau^-1(r_1) = 0`), `d(a) tau(h) = tau(h) d(a)` for
/// every chart generator `a`, and `A'(r) = 0` for a supplied connection.
pub fn check_ideal_conditions<R: Coeff>(
    calculus: &FirstOrderCalculus<R>,
    gauge: &LocalGauge<R>,
    r_gens: &[Element<R>],
    connection: Option<&ConnectionForm<R>>,
    degree: usize,
) -> Report {
    let mut report = Report::new();
    report.note(NOTE_DEGREE);
    let h = gauge.tau.source().clone();
    let chart = calculus.algebra().clone();
    if r_gens.is_empty() {
        report.push(check("ideal conditions", "ideal.empty", || {
            Outcome::Vacuous("no ideal generators: every connection of the universal calculus is covariant".into())
        }));
        return report;
    }
    let proj = |f: &Form<R>| calculus.project(f).expect("chart one-form");
    let label = |r: &Element<R>| format!("r = {r}");

    report.push(check("ideal generators Ad-invariant", "ideal.ad-invariant", || {
        let w = first_witness(r_gens, |r| ad_invariance_witness(&h, r, r_gens));
        Outcome::from_witness(w, format!("{} generators", r_gens.len()), "sum r_2 (x) S(r_1) r_3 leaves span(R) (x) H")
    }));
    for r in r_gens {
        report.push(check(format!("pure gauge term vanishes on {}", label(r)), "ideal.pure-gauge", || {
            let mut sum = Form::zero(&chart, 1);
            for (w, c) in r.terms() {
                sum = &sum + &gauge.pure_gauge(w).scale(c);
            }
            let v = proj(&sum);
            let zero = proj(&Form::zero(&chart, 1));
            Outcome::from_witness((v != zero).then(|| Witness::new(label(r), &v, "0")), "vanishes", "does not vanish")
        }));
    }
    let words = h.basis(degree);
    for (g, name) in chart.generators().iter().enumerate() {
        let a = Element::from_word(&chart, &Word::letter(g as u16), R::one());
        let da = Form::exact(&a);
        report.push(check(format!("d({name}) commutes with tau"), "ideal.central", || {
            let w = first_witness(&words, |w| {
                let t = gauge.tau.eval_word(w);
                let lhs = proj(&da.right_mul(&t).expect("chart element"));
                let rhs = proj(&da.left_mul(&t).expect("chart element"));
                (lhs != rhs).then(|| Witness::new(format!("d({name}) tau({})", h.word_string(w)), &lhs, &rhs))
            });
            Outcome::from_witness(w, format!("{} words", words.len()), format!("d({name}) tau(h) != tau(h) d({name})"))
        }));
    }
    if let Some(conn) = connection {
        let transformed = gauge_transform_connection(conn, gauge);
        for r in r_gens {
            report.push(check(format!("{}: A(r) = 0 for {}", conn.name(), label(r)), "ideal.connection", || {
                let v = proj(&conn.eval(r));
                let zero = proj(&Form::zero(&chart, 1));
                Outcome::from_witness((v != zero).then(|| Witness::new(label(r), &v, "0")), "A(r) = 0", "A(r) != 0")
            }));
            report.push(check(format!("{}: A'(r) = 0 for {}", conn.name(), label(r)), "ideal.transformed-connection", || {
                let t = match &transformed {
                    Ok(t) => t,
                    Err(e) => return Outcome::Fail(Witness::new(label(r), e, ""), "gauge does not act".into()),
                };
                let v = proj(&t.eval(r));
                let zero = proj(&Form::zero(&chart, 1));
                Outcome::from_witness((v != zero).then(|| Witness::new(label(r), &v, "0")), "A'(r) = 0", "A'(r) != 0")
            }));
        }
    }
    report
}

/// Decides whether `sum r_2 (x) S(r_1) r_3` lies in `span(gens) (x) H`.
fn ad_invariance_witness<R: Coeff>(h: &HopfAlgebra<R>, r: &Element<R>, gens: &[Element<R>]) -> Option<Witness> {
    let p = h.algebra();
    let mut by_second: BTreeMap<Word, Element<R>> = BTreeMap::new();
    for (legs, c) in h.iterated(r, 2).terms() {
        let first = Element::from_word(p, &legs[1], c.clone());
        let second = &h.antipode_word(&legs[0]) * &Element::from_word(p, &legs[2], R::one());
        for (w, d) in second.terms() {
            let entry = by_second.entry(w.clone()).or_insert_with(|| Element::zero(p));
            *entry = &*entry + &first.scale(d);
        }
    }
    by_second.into_iter().find_map(|(w, t)| {
        if t.is_zero() {
            return None;
        }
        let mut words: Vec<Word> = t.terms().keys().cloned().collect();
        for g in gens {
            words.extend(g.terms().keys().cloned());
        }
        words.sort();
        words.dedup();
        let rows: Vec<Vec<R>> = words.iter().map(|u| gens.iter().map(|g| g.coefficient(u)).collect()).collect();
        let rhs: Vec<R> = words.iter().map(|u| t.coefficient(u)).collect();
        match solve(rows, rhs, gens.len()) {
            Solution::Inconsistent { .. } => Some(Witness::new(
                format!("coefficient of {}", h.word_string(&w)),
                &t,
                "an element of span(R)",
            )),
            Solution::Found(_) | Solution::Undetermined => None,
        }
    })
}

#[cfg(test)]
mod tests;
