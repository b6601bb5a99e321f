//! Line-based presentation files. A file is a sequence of blocks; each block
//! starts with an unindented header line and continues with indented body
//! lines. `#` starts a comment.
//!
//! ```text
//! algebra B1
//!   params q
//!   gens x, x*, y
//!   star x <-> x*
//!   star y <-> y
//!   rule y x -> q^-1 x y
//! ```
//!
//! Blocks: `algebra`, `hopf`, `morphism`, `bundle`, `gauge family`,
//! `connection`, `corep` and `ideal`. Names must be declared before use.

mod expr;
mod print;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::bundle::{Bundle, BundleBuilder};
use crate::calculus::{ConnectionForm, FirstOrderCalculus, Form, LocalGauge};
use crate::gauge::{default_inverse, Corep, GaugeFamily, Side};
use crate::hopf::{HopfAlgebra, LinMap, TensorElement};
use crate::ncpoly::{Element, Morphism, Presentation, PresentationBuilder, Rule, Word};
use crate::Scalar;

use expr::{eval, parse_expr, parse_tensor, ElementRing, FormRing, FreeRing, LineError, Params};

/// Parameter values substituted while parsing, e.g. `q = 1`.
pub type Specialization = BTreeMap<String, BigRational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseErrorKind {
    Syntax,
    Semantic,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::Semantic => "semantic",
        })
    }
}

/// Located parse failure. Lines and columns are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub file: Option<String>,
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        write!(f, "{}:{}: {} error: {}", self.line, self.col, self.kind, self.message)
    }
}

/// A gauge family with the inverses that were written out explicitly.
#[derive(Clone, Debug)]
pub struct FamilyDecl {
    pub family: GaugeFamily<Scalar>,
    pub explicit_inverse: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct ConnectionDecl {
    pub connection: ConnectionForm<Scalar>,
    /// Family and chart label whose local gauge the connection is checked
    /// against.
    pub gauge: Option<(String, String)>,
}

#[derive(Clone, Debug)]
pub struct CorepDecl {
    pub corep: Corep<Scalar>,
    pub gauge: Option<String>,
}

/// Data for the ideal conditions: a calculus on a chart algebra, a local
/// gauge, generators of the ideal and an optional connection.
#[derive(Clone, Debug)]
pub struct IdealDecl {
    pub name: String,
    pub fibre: Arc<HopfAlgebra<Scalar>>,
    pub calculus: FirstOrderCalculus<Scalar>,
    pub gauge: LocalGauge<Scalar>,
    pub explicit_inverse: bool,
    pub generators: Vec<Element<Scalar>>,
    pub connection: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Decl {
    Algebra(String),
    Hopf(String),
    Morphism(String),
    Bundle(String),
    Family(String),
    Connection(String),
    Corep(String),
    Ideal(String),
}

/// Everything declared by one or more presentation files.
#[derive(Default)]
pub struct Document {
    pub algebras: BTreeMap<String, Arc<Presentation<Scalar>>>,
    pub hopfs: BTreeMap<String, Arc<HopfAlgebra<Scalar>>>,
    pub morphisms: BTreeMap<String, Arc<Morphism<Scalar>>>,
    pub bundles: BTreeMap<String, Arc<Bundle<Scalar>>>,
    pub families: BTreeMap<String, FamilyDecl>,
    pub connections: BTreeMap<String, ConnectionDecl>,
    pub coreps: BTreeMap<String, CorepDecl>,
    pub ideals: BTreeMap<String, IdealDecl>,
    /// Every parameter declared so far, specialized or not.
    params: Vec<String>,
    order: Vec<Decl>,
}

impl Document {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses a single file.
    pub fn parse(text: &str, set: &Specialization) -> Result<Self, ParseError> {
        let mut doc = Document::new();
        doc.add_file(None, text, set)?;
        Ok(doc)
    }

    /// Adds the declarations of another file; names from earlier files are
    /// visible.
    pub fn add_file(&mut self, file: Option<&str>, text: &str, set: &Specialization) -> Result<(), ParseError> {
        let mut p = FileParser { doc: self, set, file };
        p.run(text)
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Canonical text of the document; parsing it gives the same document.
    pub fn print(&self) -> String {
        print::print(self)
    }

    fn hopf(&self, name: &str) -> Option<&Arc<HopfAlgebra<Scalar>>> {
        self.hopfs.get(name)
    }
}

impl fmt::Debug for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.order).finish()
    }
}

struct Line<'a> {
    no: usize,
    indent: usize,
    text: &'a str,
}

impl<'a> Line<'a> {
    /// Column of a subslice of `text`.
    fn col_of(&self, s: &str) -> usize {
        let off = s.as_ptr() as usize - self.text.as_ptr() as usize;
        self.indent + off + 1
    }

    fn keyword(&self) -> (&'a str, &'a str) {
        let t = self.text;
        match t.find(char::is_whitespace) {
            Some(i) => (&t[..i], t[i..].trim()),
            None => (t, ""),
        }
    }
}

type LResult<T> = std::result::Result<T, (ParseErrorKind, LineError)>;

fn syntax<T>(col: usize, msg: impl Into<String>) -> LResult<T> {
    Err((ParseErrorKind::Syntax, LineError::new(col, msg)))
}

fn semantic<T>(col: usize, msg: impl Into<String>) -> LResult<T> {
    Err((ParseErrorKind::Semantic, LineError::new(col, msg)))
}

fn syn(e: LineError) -> (ParseErrorKind, LineError) {
    (ParseErrorKind::Syntax, e)
}

fn sem(e: LineError) -> (ParseErrorKind, LineError) {
    (ParseErrorKind::Semantic, e)
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphanumeric() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn is_generator_name(s: &str) -> bool {
    let base = s.trim_end_matches('*');
    let mut chars = base.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Comma- or space-separated list.
fn list(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty())
}

/// `lhs = rhs`, splitting at the first `=`.
fn split_eq<'a>(line: &Line<'a>, rest: &'a str) -> LResult<(&'a str, &'a str)> {
    match rest.find('=') {
        Some(i) => Ok((rest[..i].trim(), rest[i + 1..].trim())),
        None => syntax(line.col_of(rest), "expected `=`"),
    }
}

fn split_colon<'a>(line: &Line<'a>, rest: &'a str) -> LResult<(&'a str, &'a str)> {
    match rest.find(':') {
        Some(i) => Ok((rest[..i].trim(), rest[i + 1..].trim())),
        None => syntax(line.col_of(rest), "expected `:`"),
    }
}

fn parse_side(line: &Line<'_>, s: &str) -> LResult<Side> {
    match s {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        _ => syntax(line.col_of(s), format!("expected `left` or `right`, found `{s}`")),
    }
}

/// `NAME: A`, `NAME: A -> B`, optionally followed by a side.
struct Signature<'a> {
    name: &'a str,
    source: &'a str,
    target: Option<&'a str>,
    side: Option<&'a str>,
}

fn signature<'a>(line: &Line<'a>, rest: &'a str, arrow: bool, side: bool) -> LResult<Signature<'a>> {
    let (name, tail) = split_colon(line, rest)?;
    if !is_name(name) {
        return syntax(line.col_of(rest), "expected a name");
    }
    let toks: Vec<&str> = tail.split_whitespace().collect();
    let expect = 1 + if arrow { 2 } else { 0 } + usize::from(side);
    let shape = match toks.len() {
        n if n != expect => "",
        _ if arrow && toks[1] != "->" => "",
        _ => "ok",
    };
    if shape.is_empty() {
        let want = match (arrow, side) {
            (true, true) => "`NAME: SOURCE -> TARGET left|right`",
            (true, false) => "`NAME: SOURCE -> TARGET`",
            (false, true) => "`NAME: SOURCE left|right`",
            (false, false) => "`NAME: SOURCE`",
        };
        return syntax(line.col_of(rest), format!("expected {want}"));
    }
    Ok(Signature {
        name,
        source: toks[0],
        target: arrow.then(|| toks[2]),
        side: side.then(|| toks[toks.len() - 1]),
    })
}

fn words<'a>(line: &Line<'a>, p: &Presentation<Scalar>, text: &'a str) -> LResult<Word> {
    let mut w = Word::empty();
    if text.is_empty() {
        return syntax(line.col_of(text), "expected a word");
    }
    for tok in text.split_whitespace() {
        if tok == "1" {
            continue;
        }
        match p.generator(tok) {
            Some(g) => w.push(g),
            None => return semantic(line.col_of(tok), format!("unknown generator `{tok}` in {}", p.name())),
        }
    }
    Ok(w)
}

fn generator_of(line: &Line<'_>, p: &Presentation<Scalar>, g: &str) -> LResult<()> {
    if p.generator(g).is_none() {
        return semantic(line.col_of(g), format!("unknown generator `{g}` in {}", p.name()));
    }
    Ok(())
}

struct FileParser<'d, 's> {
    doc: &'d mut Document,
    set: &'s Specialization,
    file: Option<&'s str>,
}

impl FileParser<'_, '_> {
    fn error(&self, line: usize, (kind, e): (ParseErrorKind, LineError)) -> ParseError {
        ParseError { file: self.file.map(str::to_string), line, col: e.col, kind, message: e.message }
    }

    fn params(&self) -> Params<'_> {
        Params { declared: &self.doc.params, set: self.set }
    }

    fn run(&mut self, text: &str) -> Result<(), ParseError> {
        let mut blocks: Vec<Vec<Line<'_>>> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim_start();
            if trimmed.trim().is_empty() {
                continue;
            }
            let line = Line { no: k + 1, indent: content.len() - trimmed.len(), text: trimmed.trim_end() };
            let (kw, rest) = line.keyword();
            if line.indent == 0 {
                let header = matches!(kw, "algebra" | "hopf" | "morphism" | "bundle" | "connection" | "corep" | "ideal")
                    || (kw == "gauge" && rest.split_whitespace().next() == Some("family"));
                if !header {
                    let e = LineError::new(1, format!("expected a block header, found `{kw}`"));
                    return Err(self.error(line.no, (ParseErrorKind::Syntax, e)));
                }
                blocks.push(vec![line]);
            } else if let Some(b) = blocks.last_mut() {
                b.push(line);
            } else {
                return Err(self.error(line.no, (ParseErrorKind::Syntax, LineError::new(line.indent + 1, "expected a block header"))));
            }
        }
        for block in &blocks {
            let (kw, _) = block[0].keyword();
            let r = match kw {
                "algebra" => self.algebra(block),
                "hopf" => self.hopf(block),
                "morphism" => self.morphism(block),
                "bundle" => self.bundle(block),
                "gauge" => self.family(block),
                "connection" => self.connection(block),
                "corep" => self.corep(block),
                _ => self.ideal(block),
            };
            r.map_err(|(no, e)| self.error(no, e))?;
        }
        Ok(())
    }

    fn taken(&self, name: &str, exists: bool, header: &Line<'_>) -> Result<(), (usize, (ParseErrorKind, LineError))> {
        if exists {
            let col = header.col_of(header.text.find(name).map(|i| &header.text[i..]).unwrap_or(header.text));
            return Err((header.no, (ParseErrorKind::Semantic, LineError::new(col, format!("`{name}` is declared twice")))));
        }
        Ok(())
    }

    fn algebra(&mut self, block: &[Line<'_>]) -> BResult<()> {
        let h = &block[0];
        let (_, name) = h.keyword();
        if !is_name(name) {
            return at(h, syntax(h.col_of(name), "expected `algebra NAME`"));
        }
        self.taken(name, self.doc.algebras.contains_key(name), h)?;
        let mut params: Vec<String> = Vec::new();
        let mut gens: Option<(Vec<String>, usize)> = None;
        let mut stars = Vec::new();
        let mut rules = Vec::new();
        for line in &block[1..] {
            let (kw, rest) = line.keyword();
            match kw {
                "params" => {
                    for p in list(rest) {
                        if !is_generator_name(p) || p.ends_with('*') {
                            return at(line, syntax(line.col_of(p), format!("bad parameter name `{p}`")));
                        }
                        params.push(p.to_string());
                    }
                }
                "gens" => {
                    let mut gs = Vec::new();
                    for g in list(rest) {
                        if !is_generator_name(g) {
                            return at(line, syntax(line.col_of(g), format!("bad generator name `{g}`")));
                        }
                        gs.push(g.to_string());
                    }
                    gens = Some((gs, line.no));
                }
                "star" => {
                    let Some(i) = rest.find("<->") else {
                        return at(line, syntax(line.col_of(rest), "expected `a <-> b`"));
                    };
                    stars.push((line, rest[..i].trim(), rest[i + 3..].trim()));
                }
                "rule" => rules.push((line, rest)),
                _ => return at(line, unknown_keyword(line, kw, "algebra")),
            }
        }
        let (gens, gens_line) = gens.unwrap_or((Vec::new(), h.no));
        if gens.is_empty() {
            return Err((gens_line, (ParseErrorKind::Semantic, LineError::new(1, format!("algebra `{name}` has an empty generator list")))));
        }
        for p in &params {
            if !self.doc.params.contains(p) {
                self.doc.params.push(p.clone());
            }
        }
        let remaining: Vec<&str> =
            params.iter().filter(|p| !self.set.contains_key(*p)).map(String::as_str).collect();
        let gen_refs: Vec<&str> = gens.iter().map(String::as_str).collect();
        let mut builder = PresentationBuilder::new(name, &gen_refs).params(&remaining);
        for (line, a, b) in stars {
            for g in [a, b] {
                if !gens.iter().any(|x| x == g) {
                    return at(line, semantic(line.col_of(g), format!("unknown generator `{g}`")));
                }
            }
            builder = builder.star(a, b);
        }
        for (line, rest) in rules {
            let Some(i) = rest.find("->") else {
                return at(line, syntax(line.col_of(rest), "expected `word -> expression`"));
            };
            let (lhs_text, rhs_text) = (rest[..i].trim(), &rest[i + 2..]);
            let lhs = self.free_word(line, &gens, lhs_text).map_err(|e| (line.no, e))?;
            let rhs_trim = rhs_text.trim_start();
            let col = line.col_of(rhs_trim);
            let e = parse_expr(rhs_trim, col).map_err(|e| (line.no, syn(e)))?;
            let rhs = eval(&FreeRing { generators: &gens }, &self.params(), &e).map_err(|e| (line.no, sem(e)))?;
            if let Some(w) = rhs.keys().find(|w| **w >= lhs) {
                let show = |w: &Word| -> String {
                    if w.is_empty() {
                        return "1".into();
                    }
                    w.letters().iter().map(|g| gens[*g as usize].as_str()).collect::<Vec<_>>().join(" ")
                };
                return at(
                    line,
                    semantic(col, format!("rule is not degree-lowering: `{}` is not below `{}`", show(w), show(&lhs))),
                );
            }
            builder = builder.word_rule(Rule { lhs, rhs: rhs.into_iter().collect() });
        }
        let p = builder.build().map_err(|e| (h.no, (ParseErrorKind::Semantic, LineError::new(h.col_of(name), e.to_string()))))?;
        self.doc.algebras.insert(name.to_string(), p);
        self.doc.order.push(Decl::Algebra(name.to_string()));
        Ok(())
    }

    fn free_word(&self, line: &Line<'_>, gens: &[String], text: &str) -> LResult<Word> {
        if text.is_empty() {
            return syntax(line.col_of(text), "expected a word");
        }
        let mut w = Word::empty();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            match gens.iter().position(|g| g == tok) {
                Some(i) => w.push(i as u16),
                None => return semantic(line.col_of(tok), format!("unknown generator `{tok}`")),
            }
        }
        if w.is_empty() {
            return semantic(line.col_of(text), "a rule cannot rewrite the empty word");
        }
        Ok(w)
    }

    fn element(&self, line: &Line<'_>, p: &Arc<Presentation<Scalar>>, text: &str) -> LResult<Element<Scalar>> {
        element_in(line, p, text, &self.params())
    }

    fn form(&self, line: &Line<'_>, p: &Arc<Presentation<Scalar>>, text: &str) -> LResult<Form<Scalar>> {
        let e = parse_expr(text, line.col_of(text)).map_err(syn)?;
        eval(&FormRing(p), &self.params(), &e).map_err(sem)
    }

    fn scalar(&self, line: &Line<'_>, p: &Arc<Presentation<Scalar>>, text: &str) -> LResult<Scalar> {
        let v = self.element(line, p, text)?;
        if v.is_zero() {
            return Ok(Scalar::zero());
        }
        match (v.terms().len(), v.terms().get(&Word::empty())) {
            (1, Some(c)) => Ok(c.clone()),
            _ => semantic(line.col_of(text), format!("expected a scalar, found `{v}`")),
        }
    }

    fn tensor(&self, line: &Line<'_>, p: &Arc<Presentation<Scalar>>, text: &str) -> LResult<TensorElement<Scalar>> {
        let col = line.col_of(text);
        let t = parse_tensor(text, col).map_err(syn)?;
        let slots = [p.clone(), p.clone()];
        let mut out = TensorElement::zero(&slots);
        for (neg, factors) in t {
            if factors.len() != 2 {
                return semantic(col, format!("expected two tensor factors, found {}", factors.len()));
            }
            let a = eval(&ElementRing(p), &self.params(), &factors[0]).map_err(sem)?;
            let b = eval(&ElementRing(p), &self.params(), &factors[1]).map_err(sem)?;
            let mut term = TensorElement::pure(&[&a, &b]);
            if neg {
                term = -&term;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    fn lookup_algebra(&self, line: &Line<'_>, name: &str) -> LResult<Arc<Presentation<Scalar>>> {
        match self.doc.algebras.get(name) {
            Some(p) => Ok(p.clone()),
            None => semantic(line.col_of(name), format!("unknown algebra `{name}`")),
        }
    }

    fn lookup_hopf(&self, line: &Line<'_>, name: &str) -> LResult<Arc<HopfAlgebra<Scalar>>> {
        match self.doc.hopf(name) {
            Some(h) => Ok(h.clone()),
            None => semantic(line.col_of(name), format!("unknown Hopf algebra `{name}`")),
        }
    }

    fn hopf(&mut self, block: &[Line<'_>]) -> BResult<()> {
        let h = &block[0];
        let (_, name) = h.keyword();
        if !is_name(name) {
            return at(h, syntax(h.col_of(name), "expected `hopf NAME`"));
        }
        self.taken(name, self.doc.hopfs.contains_key(name), h)?;
        let p = self.lookup_algebra(h, name).map_err(|e| (h.no, e))?;
        let mut delta = Vec::new();
        let mut eps = Vec::new();
        let mut s = Vec::new();
        let mut sinv = Vec::new();
        for line in &block[1..] {
            let (kw, rest) = line.keyword();
            let (g, rhs) = split_eq(line, rest).map_err(|e| (line.no, e))?;
            let r = match kw {
                "Delta" | "eps" | "S" | "Sinv" => generator_of(line, &p, g),
                _ => unknown_keyword(line, kw, "hopf"),
            };
            r.map_err(|e| (line.no, e))?;
            let r = match kw {
                "Delta" => self.tensor(line, &p, rhs).map(|t| delta.push((g, t))),
                "eps" => self.scalar(line, &p, rhs).map(|c| eps.push((g, c))),
                "S" => self.element(line, &p, rhs).map(|e| s.push((g, e))),
                _ => self.element(line, &p, rhs).map(|e| sinv.push((g, e))),
            };
            r.map_err(|e| (line.no, e))?;
        }
        let header_err = |e: crate::Error| (h.no, (ParseErrorKind::Semantic, LineError::new(h.col_of(name), e.to_string())));
        let antipode = Morphism::new("S", &p, &p, s, true).map_err(header_err)?;
        let antipode_inv = if sinv.is_empty() {
            None
        } else {
            Some(Morphism::new("Sinv", &p, &p, sinv, true).map_err(header_err)?)
        };
        let hopf = HopfAlgebra::new(name, &p, delta, eps, antipode, antipode_inv).map_err(header_err)?;
        self.doc.hopfs.insert(name.to_string(), hopf);
        self.doc.order.push(Decl::Hopf(name.to_string()));
        Ok(())
    }

    fn morphism(&mut self, block: &[Line<'_>]) -> BResult<()> {
        let h = &block[0];
        let (_, rest) = h.keyword();
        let sig = signature(h, rest, true, false).map_err(|e| (h.no, e))?;
        self.taken(sig.name, self.doc.morphisms.contains_key(sig.name), h)?;
        let src = self.lookup_algebra(h, sig.source).map_err(|e| (h.no, e))?;
        let dst_name = sig.target.expect("arrow signature");
        let dst = self.lookup_algebra(h, dst_name).map_err(|e| (h.no, e))?;
        let mut images = Vec::new();
        for line in &block[1..] {
            let (kw, rest) = line.keyword();
            if kw != "map" {
                return at(line, unknown_keyword(line, kw, "morphism"));
            }
            let (g, rhs) = split_eq(line, rest).map_err(|e| (line.no, e))?;
            generator_of(line, &src, g).map_err(|e| (line.no, e))?;
            images.push((g, self.element(line, &dst, rhs).map_err(|e| (line.no, e))?));
        }
        let mut m = Morphism::new(sig.name, &src, &dst, images, false)
            .map_err(|e| (h.no, (ParseErrorKind::Semantic, LineError::new(h.col_of(sig.name), e.to_string()))))?;
        // uncertified morphisms are kept so that checks can report on them
        m.try_certify();
        self.doc.morphisms.insert(sig.name.to_string(), Arc::new(m));
        self.doc.order.push(Decl::Morphism(sig.name.to_string()));
        Ok(())
    }

    fn bundle(&mut self, block: &[Line<'_>]) -> BResult<()> {
        let h = &block[0];
        let (_, rest) = h.keyword();
        let sig = signature(h, rest, false, false).map_err(|e| (h.no, e))?;
        self.taken(sig.name, self.doc.bundles.contains_key(sig.name), h)?;
        let fibre = self.lookup_hopf(h, sig.source).map_err(|e| (h.no, e))?;
        let mut builder = BundleBuilder::new(sig.name, &fibre);
        let mut labels: Vec<String> = Vec::new();
        for line in &block[1..] {
            let (kw, rest) = line.keyword();
            let r: LResult<()> = (|| {
                match kw {
                    "chart" => {
                        let (label, alg) = split_eq(line, rest)?;
                        if !is_name(label) {
                            return syntax(line.col_of(rest), "expected a chart label");
                        }
                        builder = std::mem::replace(&mut builder, BundleBuilder::new("", &fibre))
                            .chart(label, &self.lookup_algebra(line, alg)?);
                        labels.push(label.to_string());
                    }
                    "overlap" => {
                        let (pair, alg) = split_eq(line, rest)?;
                        let (i, j) = chart_pair(line, pair, &labels)?;
                        builder = std::mem::replace(&mut builder, BundleBuilder::new("", &fibre))
                            .overlap(i, j, &self.lookup_algebra(line, alg)?);
                    }
                    "restrict" | "transition" => {
                        let (pair, m) = split_colon(line, rest)?;
                        let (i, j) = chart_pair(line, pair, &labels)?;
                        let Some(m) = self.doc.morphisms.get(m) else {
                            return semantic(line.col_of(m), format!("unknown morphism `{m}`"));
                        };
                        let b = std::mem::replace(&mut builder, BundleBuilder::new("", &fibre));
                        builder = if kw == "restrict" { b.restriction(i, j, m) } else { b.transition(i, j, m) };
                    }
                    _ => return unknown_keyword(line, kw, "bundle"),
                }
                Ok(())
            })();
            r.map_err(|e| (line.no, e))?;
        }
        let b = builder
            .build()
            .map_err(|e| (h.no, (ParseErrorKind::Semantic, LineError::new(h.col_of(sig.name), e.to_string()))))?;
        self.doc.bundles.insert(sig.name.to_string(), b);
        self.doc.order.push(Decl::Bundle(sig.name.to_string()));
        Ok(())
    }

    fn family(&mut self, block: &[Line<'_>]) -> BResult<()> {
        let h = &block[0];
        let (_, rest) = h.keyword();
        let rest = rest["family".len()..].trim_start();
        let sig = signature(h, rest, false, true).map_err(|e| (h.no, e))?;
        self.taken(sig.name, self.doc.families.contains_key(sig.name), h)?;
        let side = parse_side(h, sig.side.expect("side")).map_err(|e| (h.no, e))?;
        let Some(bundle) = self.doc.bundles.get(sig.source).cloned() else {
            return at(h, semantic(h.col_of(sig.source), format!("unknown bundle `{}`", sig.source)));
        };
        let n = bundle.charts().len();
        let mut taus: Vec<Option<LinMap<Scalar>>> = vec![None; n];
        let mut invs: Vec<Option<LinMap<Scalar>>> = vec![None; n];
        for line in &block[1..] {
            let (kw, rest) = line.keyword();
            let r: LResult<()> = (|| {
                if kw != "tau" && kw != "tauinv" {
                    return unknown_keyword(line, kw, "gauge family");
                }
                let (label, rhs) = split_eq(line, rest)?;
                let Some(i) = bundle.chart_index(label) else {
                    return semantic(line.col_of(rest), format!("unknown chart `{label}`"));
                };
                let map = self.linmap(line, bundle.fibre(), &bundle.charts()[i].algebra, rhs)?;
                let slot = if kw == "tau" { &mut taus[i] } else { &mut invs[i] };
                if slot.is_some() {
                    return semantic(line.col_of(rest), format!("`{kw} {label}` given twice"));
                }
                *slot = Some(map);
                Ok(())
            })();
            r.map_err(|e| (line.no, e))?;
        }
        let mut full = Vec::with_capacity(n);
        for (i, t) in taus.into_iter().enumerate() {
            match t {
                Some(t) => full.push(t),
                None => {
                    let label = &bundle.charts()[i].label;
                    return at(h, semantic(h.col_of(sig.name), format!("no `tau {label}` for family `{}`", sig.name)));
                }
            }
        }
        let explicit_inverse = invs.iter().map(Option::is_some).collect();
        let family = GaugeFamily::new(sig.name, &bundle, side, full, invs)
            .map_err(|e| (h.no, (ParseErrorKind::Semantic, LineError::new(h.col_of(sig.name), e.to_string()))))?;
        self.doc.families.insert(sig.name.to_string(), FamilyDecl { family, explicit_inverse });
        self.doc.order.push(Decl::Family(sig.name.to_string()));
        Ok(())
    }

    fn linmap(
        &self,
        line: &Line<'_>,
        fibre: &Arc<HopfAlgebra<Scalar>>,
        target: &Arc<Presentation<Scalar>>,
        text: &str,
    ) -> LResult<LinMap<Scalar>> {
        let mut p = MapParser {
            params: self.params(),
            morphisms: &self.doc.morphisms,
            line,
            text,
            pos: 0,
            fibre,
            target,
        };
        let m = p.map()?;
        p.ws();
        if p.pos < text.len() {
            return syntax(p.col(), "unexpected text after map");
        }
        Ok(m)
    }

    fn connection(&mut self, block: &[Line<'_>]) -> BResult<()> {
        let h = &block[0];
        let (_, rest) = h.keyword();
        let sig = signature(h, rest, true, true).map_err(|e| (h.no, e))?;
        self.taken(sig.name, self.doc.connections.contains_key(sig.name), h)?;
        let side = parse_side(h, sig.side.expect("side")).map_err(|e| (h.no, e))?;
        let fibre = self.lookup_hopf(h, sig.source).map_err(|e| (h.no, e))?;
        let alg = self.lookup_algebra(h, sig.target.expect("target")).map_err(|e| (h.no, e))?;
        let mut entries = Vec::new();
        let mut gauge = None;
        for line in &block[1..] {
            let (kw, rest) = line.keyword();
            let r: LResult<()> = (|| {
                match kw {
                    "value" => {
                        let (w, rhs) = split_eq(line, rest)?;
                        let w = words(line, fibre.algebra(), w)?;
                        entries.push((w, self.form(line, &alg, rhs)?));
                    }
                    "gauge" => {
                        let toks: Vec<&str> = rest.split_whitespace().collect();
                        let [fam, label] = toks[..] else {
                            return syntax(line.col_of(rest), "expected `gauge FAMILY CHART`");
                        };
                        let Some(decl) = self.doc.families.get(fam) else {
                            return semantic(line.col_of(fam), format!("unknown gauge family `{fam}`"));
                        };
                        let bundle = decl.family.bundle();
                        let Some(i) = bundle.chart_index(label) else {
                            return semantic(line.col_of(label), format!("unknown chart `{label}`"));
                        };
                        if !Arc::ptr_eq(bundle.fibre(), &fibre) || !Arc::ptr_eq(&bundle.charts()[i].algebra, &alg) {
                            return semantic(line.col_of(fam), format!("chart {label} of `{fam}` is not a map {} -> {}", fibre.name(), alg.name()));
                        }
                        if decl.family.side() != side {
                            return semantic(line.col_of(fam), format!("`{fam}` is a {} family", decl.family.side()));
                        }
                        gauge = Some((fam.to_string(), label.to_string()));
                    }
                    _ => return unknown_keyword(line, kw, "connection"),
                }
                Ok(())
            })();
            r.map_err(|e| (line.no, e))?;
        }
        let connection = ConnectionForm::table(sig.name, side, &fibre, &alg, entries)
            .map_err(|e| (h.no, (ParseErrorKind::Semantic, LineError::new(h.col_of(sig.name), e.to_string()))))?;
        self.doc.connections.insert(sig.name.to_string(), ConnectionDecl { connection, gauge });
        self.doc.order.push(Decl::Connection(sig.name.to_string()));
        Ok(())
    }

    fn corep(&mut self, block: &[Line<'_>]) -> BResult<()> {
        let h = &block[0];
        let (_, rest) = h.keyword();
        let sig = signature(h, rest, false, false).map_err(|e| (h.no, e))?;
        self.taken(sig.name, self.doc.coreps.contains_key(sig.name), h)?;
        let fibre = self.lookup_hopf(h, sig.source).map_err(|e| (h.no, e))?;
        let mut rows = Vec::new();
        let mut gauge = None;
        for line in &block[1..] {
            let (kw, rest) = line.keyword();
            let r: LResult<()> = (|| {
                match kw {
                    "row" => {
                        let mut row = Vec::new();
                        for entry in rest.split(',') {
                            row.push(self.element(line, fibre.algebra(), entry.trim())?);
                        }
                        rows.push(row);
                    }
                    "gauge" => {
                        let Some(decl) = self.doc.families.get(rest) else {
                            return semantic(line.col_of(rest), format!("unknown gauge family `{rest}`"));
                        };
                        if !Arc::ptr_eq(decl.family.bundle().fibre(), &fibre) {
                            return semantic(line.col_of(rest), format!("`{rest}` is not a family over {}", fibre.name()));
                        }
                        gauge = Some(rest.to_string());
                    }
                    _ => return unknown_keyword(line, kw, "corep"),
                }
                Ok(())
            })();
            r.map_err(|e| (line.no, e))?;
        }
        let corep = Corep::new(sig.name, &fibre, rows)
            .map_err(|e| (h.no, (ParseErrorKind::Semantic, LineError::new(h.col_of(sig.name), e.to_string()))))?;
        self.doc.coreps.insert(sig.name.to_string(), CorepDecl { corep, gauge });
        self.doc.order.push(Decl::Corep(sig.name.to_string()));
        Ok(())
    }

    fn ideal(&mut self, block: &[Line<'_>]) -> BResult<()> {
        let h = &block[0];
        let (_, rest) = h.keyword();
        let sig = signature(h, rest, true, true).map_err(|e| (h.no, e))?;
        self.taken(sig.name, self.doc.ideals.contains_key(sig.name), h)?;
        let side = parse_side(h, sig.side.expect("side")).map_err(|e| (h.no, e))?;
        let fibre = self.lookup_hopf(h, sig.source).map_err(|e| (h.no, e))?;
        let alg = self.lookup_algebra(h, sig.target.expect("target")).map_err(|e| (h.no, e))?;
        let mut calculus: Option<(&Line<'_>, bool)> = None;
        let mut partials = Vec::new();
        let mut tau = None;
        let mut tau_inv = None;
        let mut generators = Vec::new();
        let mut connection = None;
        for line in &block[1..] {
            let (kw, rest) = line.keyword();
            let r: LResult<()> = (|| {
                match kw {
                    "calculus" => match rest {
                        "universal" => calculus = Some((line, false)),
                        "derivation" => calculus = Some((line, true)),
                        _ => return syntax(line.col_of(rest), "expected `universal` or `derivation`"),
                    },
                    "partial" => {
                        let (g, rhs) = split_eq(line, rest)?;
                        generator_of(line, &alg, g)?;
                        partials.push((g, self.element(line, &alg, rhs)?));
                    }
                    "tau" | "tauinv" => {
                        let Some(rhs) = rest.strip_prefix('=') else {
                            return syntax(line.col_of(rest), "expected `=`");
                        };
                        let m = self.linmap(line, &fibre, &alg, rhs.trim())?;
                        if kw == "tau" {
                            tau = Some(m);
                        } else {
                            tau_inv = Some(m);
                        }
                    }
                    "gen" => generators.push(self.element(line, fibre.algebra(), rest)?),
                    "connection" => {
                        let Some(c) = self.doc.connections.get(rest) else {
                            return semantic(line.col_of(rest), format!("unknown connection `{rest}`"));
                        };
                        let c = &c.connection;
                        if !Arc::ptr_eq(c.algebra(), &alg) || !Arc::ptr_eq(c.fibre(), &fibre) || c.side() != side {
                            return semantic(line.col_of(rest), format!("connection `{rest}` does not match the ideal"));
                        }
                        connection = Some(rest.to_string());
                    }
                    _ => return unknown_keyword(line, kw, "ideal"),
                }
                Ok(())
            })();
            r.map_err(|e| (line.no, e))?;
        }
        let header_err =
            |msg: String| (h.no, (ParseErrorKind::Semantic, LineError::new(h.col_of(sig.name), msg)));
        let calculus = match calculus {
            Some((line, true)) => FirstOrderCalculus::derivation(&alg, partials)
                .map_err(|e| (line.no, (ParseErrorKind::Semantic, LineError::new(line.col_of(line.text), e.to_string()))))?,
            Some((line, false)) if !partials.is_empty() => {
                return at(line, semantic(line.indent + 1, "`partial` needs `calculus derivation`"));
            }
            _ => FirstOrderCalculus::Universal(alg.clone()),
        };
        let tau = tau.ok_or_else(|| header_err(format!("ideal `{}` has no `tau`", sig.name)))?;
        let explicit_inverse = tau_inv.is_some();
        let inv = match tau_inv {
            Some(m) => m,
            None => default_inverse(&tau, side)
                .ok_or_else(|| header_err(format!("no convolution inverse derivable for `{tau}`")))?,
        };
        let gauge = LocalGauge::new(side, tau, inv).map_err(|e| header_err(e.to_string()))?;
        self.doc.ideals.insert(
            sig.name.to_string(),
            IdealDecl { name: sig.name.to_string(), fibre, calculus, gauge, explicit_inverse, generators, connection },
        );
        self.doc.order.push(Decl::Ideal(sig.name.to_string()));
        Ok(())
    }
}

type BResult<T> = std::result::Result<T, (usize, (ParseErrorKind, LineError))>;

fn at<T>(line: &Line<'_>, r: LResult<T>) -> BResult<T> {
    r.map_err(|e| (line.no, e))
}

fn unknown_keyword<T>(line: &Line<'_>, kw: &str, block: &str) -> LResult<T> {
    syntax(line.col_of(kw), format!("unexpected `{kw}` in {block} block"))
}

/// `12` (single-character labels) or `1 2`.
fn chart_pair<'a>(line: &Line<'a>, text: &'a str, labels: &[String]) -> LResult<(&'a str, &'a str)> {
    let known = |s: &str| labels.iter().any(|l| l == s);
    let toks: Vec<&str> = text.split_whitespace().collect();
    let found: Vec<(&str, &str)> = match toks[..] {
        [a, b] => vec![(a, b)],
        [t] => (1..t.len())
            .filter(|&k| t.is_char_boundary(k))
            .map(|k| (&t[..k], &t[k..]))
            .filter(|(a, b)| known(a) && known(b))
            .collect(),
        _ => vec![],
    };
    match found[..] {
        [(a, b)] => {
            for s in [a, b] {
                if !known(s) {
                    return semantic(line.col_of(s), format!("unknown chart `{s}`"));
                }
            }
            Ok((a, b))
        }
        [] => semantic(line.col_of(text), format!("`{text}` does not name a pair of charts")),
        _ => semantic(line.col_of(text), format!("`{text}` is ambiguous; separate the labels with a space")),
    }
}

fn element_in(line: &Line<'_>, p: &Arc<Presentation<Scalar>>, text: &str, params: &Params<'_>) -> LResult<Element<Scalar>> {
    let e = parse_expr(text, line.col_of(text)).map_err(syn)?;
    eval(&ElementRing(p), params, &e).map_err(sem)
}

/// Recursive descent over linear-map constructors.
struct MapParser<'a> {
    params: Params<'a>,
    morphisms: &'a BTreeMap<String, Arc<Morphism<Scalar>>>,
    line: &'a Line<'a>,
    text: &'a str,
    pos: usize,
    fibre: &'a Arc<HopfAlgebra<Scalar>>,
    target: &'a Arc<Presentation<Scalar>>,
}

impl MapParser<'_> {
    fn col(&self) -> usize {
        self.line.col_of(&self.text[self.pos..])
    }

    fn ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> LResult<()> {
        self.ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += 1;
            Ok(())
        } else {
            syntax(self.col(), format!("expected `{c}`"))
        }
    }

    fn ident(&mut self) -> &str {
        self.ws();
        let start = self.pos;
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_' || c == '\'') {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn map(&mut self) -> LResult<LinMap<Scalar>> {
        self.ws();
        let col = self.col();
        let name = self.ident().to_string();
        let lift = |r: crate::Result<LinMap<Scalar>>| r.or_else(|e| semantic(col, e.to_string()));
        match name.as_str() {
            "id" => {
                if !Arc::ptr_eq(self.fibre.algebra(), self.target) {
                    return semantic(col, format!("`id` maps into {}, not {}", self.fibre.name(), self.target.name()));
                }
                Ok(LinMap::identity(self.fibre))
            }
            "counit" => Ok(LinMap::counit(self.fibre, self.target)),
            "hom" => {
                self.eat('(')?;
                let mcol = {
                    self.ws();
                    self.col()
                };
                let m = self.ident().to_string();
                self.eat(')')?;
                let Some(morphism) = self.morphisms.get(&m) else {
                    return semantic(mcol, format!("unknown morphism `{m}`"));
                };
                if !Arc::ptr_eq(morphism.target(), self.target) {
                    return semantic(mcol, format!("`{m}` maps into {}, not {}", morphism.target().name(), self.target.name()));
                }
                lift(LinMap::hom(self.fibre, morphism))
            }
            "table" => self.table(col),
            "conv" | "conv_op" => {
                self.eat('(')?;
                let f = self.map()?;
                self.eat(',')?;
                let g = self.map()?;
                self.eat(')')?;
                lift(if name == "conv" { LinMap::convolve(&f, &g) } else { LinMap::convolve_opposite(&f, &g) })
            }
            "convpow" => {
                self.eat('(')?;
                let f = self.map()?;
                self.eat(',')?;
                self.ws();
                let ncol = self.col();
                let n: i64 = match self.ident().parse() {
                    Ok(n) => n,
                    Err(_) => return syntax(ncol, "expected a positive integer"),
                };
                self.eat(')')?;
                if n < 1 {
                    return semantic(ncol, "convolution powers start at 1");
                }
                lift(LinMap::conv_power(&f, n, false))
            }
            "compose_S" | "compose_Sinv" => {
                self.eat('(')?;
                let f = self.map()?;
                self.eat(')')?;
                let s = if name == "compose_S" { crate::hopf::Antipode::S } else { crate::hopf::Antipode::SInv };
                lift(f.precompose(s))
            }
            "" => syntax(col, "expected a linear map"),
            _ => syntax(col, format!("unknown map constructor `{name}`")),
        }
    }

    fn table(&mut self, col: usize) -> LResult<LinMap<Scalar>> {
        self.eat('{')?;
        let Some(len) = self.text[self.pos..].find('}') else {
            return syntax(self.col(), "unclosed `{`");
        };
        let body = &self.text[self.pos..self.pos + len];
        self.pos += len + 1;
        let mut entries = Vec::new();
        for entry in body.split(';') {
            if entry.trim().is_empty() {
                continue;
            }
            let Some(k) = entry.find(':') else {
                return syntax(self.line.col_of(entry.trim_start()), "expected `word: value`");
            };
            let w = words(self.line, self.fibre.algebra(), entry[..k].trim())?;
            let v = element_in(self.line, self.target, entry[k + 1..].trim(), &self.params)?;
            entries.push((w, v));
        }
        LinMap::table(self.fibre, self.target, entries).or_else(|e| semantic(col, e.to_string()))
    }
}

#[cfg(test)]
mod tests;
