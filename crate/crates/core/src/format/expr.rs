//! Tokenizer, expression trees and their evaluation in the algebras of a
//! presentation file.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::calculus::Form;
use crate::ncpoly::{add_into, Element, Gen, Presentation, Word};
use crate::scalar::Coeff;
use crate::Scalar;

/// Error inside a single line; `col` is a 1-based column of that line.
#[derive(Debug, Clone, PartialEq)]
pub struct LineError {
    pub col: usize,
    pub message: String,
}

impl LineError {
    pub fn new(col: usize, message: impl Into<String>) -> Self {
        LineError { col, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    /// Identifier immediately followed by `(`.
    Call(String),
    Plus,
    Minus,
    Slash,
    Caret,
    LParen,
    RParen,
    Tensor,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokens with their columns. `(x)` becomes a tensor mark only when
/// `tensor` is set.
fn tokenize(text: &str, col0: usize, tensor: bool) -> Result<Vec<(Tok, usize)>, LineError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if tensor && c == '(' && chars.get(i + 1) == Some(&'x') && chars.get(i + 2) == Some(&')') {
            out.push((Tok::Tensor, col));
            i += 3;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Num(s.parse().expect("digits")), col));
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            while i < chars.len() && chars[i] == '*' {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            if chars.get(i) == Some(&'(') {
                i += 1;
                out.push((Tok::Call(s), col));
            } else {
                out.push((Tok::Ident(s), col));
            }
            continue;
        }
        let t = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(LineError::new(col, format!("unexpected character `{c}`"))),
        };
        out.push((t, col));
        i += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub enum Expr {
    Num(BigRational),
    Ident(String, usize),
    Call(String, Box<Expr>, usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, i32, usize),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), LineError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(LineError::new(self.col(), format!("expected {what}")))
        }
    }

    fn sum(&mut self) -> Result<Expr, LineError> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Expr::Neg(Box::new(self.product()?))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = Expr::Add(Box::new(acc), Box::new(self.product()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = Expr::Sub(Box::new(acc), Box::new(self.product()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::Call(_) | Tok::LParen))
    }

    fn product(&mut self) -> Result<Expr, LineError> {
        if !self.starts_atom() {
            return Err(LineError::new(self.col(), "expected a term"));
        }
        let mut acc = self.power()?;
        loop {
            if self.peek() == Some(&Tok::Slash) {
                let col = self.col();
                self.pos += 1;
                if !self.starts_atom() {
                    return Err(LineError::new(self.col(), "expected a divisor"));
                }
                acc = Expr::Div(Box::new(acc), Box::new(self.power()?), col);
            } else if self.starts_atom() {
                acc = Expr::Mul(Box::new(acc), Box::new(self.power()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Expr, LineError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        let col = self.col();
        self.pos += 1;
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.bump() {
            Some(Tok::Num(n)) => {
                let n: i32 = n.try_into().map_err(|_| LineError::new(col, "exponent out of range"))?;
                Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }, col))
            }
            _ => Err(LineError::new(col, "expected an integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<Expr, LineError> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(Expr::Num(BigRational::from_integer(n))),
            Some(Tok::Ident(s)) => Ok(Expr::Ident(s, col)),
            Some(Tok::Call(f)) => {
                let inner = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Call(f, Box::new(inner), col))
            }
            Some(Tok::LParen) => {
                let inner = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(LineError::new(col, "expected a term")),
        }
    }

    fn finish(&self) -> Result<(), LineError> {
        match self.peek() {
            None => Ok(()),
            Some(Tok::RParen) => Err(LineError::new(self.col(), "unbalanced `)`")),
            Some(_) => Err(LineError::new(self.col(), "unexpected token")),
        }
    }
}

/// Parses `text`, which starts at column `col0` of its line.
pub fn parse_expr(text: &str, col0: usize) -> Result<Expr, LineError> {
    let toks = tokenize(text, col0, false)?;
    if toks.is_empty() {
        return Err(LineError::new(col0, "empty expression"));
    }
    let mut p = Parser { toks, pos: 0, end_col: col0 + text.len() };
    let e = p.sum()?;
    p.finish()?;
    Ok(e)
}

/// A tensor expression: signed terms, each a list of slot products.
pub type TensorExpr = Vec<(bool, Vec<Expr>)>;

pub fn parse_tensor(text: &str, col0: usize) -> Result<TensorExpr, LineError> {
    let toks = tokenize(text, col0, true)?;
    if toks.is_empty() {
        return Err(LineError::new(col0, "empty expression"));
    }
    let mut p = Parser { toks, pos: 0, end_col: col0 + text.len() };
    let mut out = Vec::new();
    let mut neg = false;
    match p.peek() {
        Some(Tok::Minus) => {
            neg = true;
            p.pos += 1;
        }
        Some(Tok::Plus) => p.pos += 1,
        _ => {}
    }
    loop {
        let mut slots = vec![p.product()?];
        while p.peek() == Some(&Tok::Tensor) {
            p.pos += 1;
            slots.push(p.product()?);
        }
        out.push((neg, slots));
        match p.peek() {
            Some(Tok::Plus) => neg = false,
            Some(Tok::Minus) => neg = true,
            _ => break,
        }
        p.pos += 1;
    }
    p.finish()?;
    Ok(out)
}

/// Values an expression can evaluate to.
pub trait Ring {
    type V: Clone;
    fn scalar(&self, c: Scalar) -> Self::V;
    fn generator(&self, name: &str) -> Option<Self::V>;
    fn add(&self, a: &Self::V, b: &Self::V) -> Result<Self::V, String>;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Result<Self::V, String>;
    fn scale(&self, a: &Self::V, c: &Scalar) -> Self::V;
    fn as_scalar(&self, v: &Self::V) -> Option<Scalar>;
    fn call(&self, name: &str, _arg: &Self::V) -> Result<Self::V, String> {
        Err(format!("unknown function `{name}`"))
    }
}

/// Parameter values: declared parameters, some of them specialized.
pub struct Params<'a> {
    pub declared: &'a [String],
    pub set: &'a BTreeMap<String, BigRational>,
}

impl Params<'_> {
    fn lookup(&self, name: &str) -> Option<Scalar> {
        if !self.declared.iter().any(|p| p == name) {
            return None;
        }
        Some(match self.set.get(name) {
            Some(v) => Scalar::constant(v.clone()),
            None => Scalar::param(name, 1),
        })
    }
}

pub fn eval<K: Ring>(ring: &K, params: &Params<'_>, e: &Expr) -> Result<K::V, LineError> {
    match e {
        Expr::Num(n) => Ok(ring.scalar(Scalar::constant(n.clone()))),
        Expr::Ident(s, col) => {
            if let Some(v) = ring.generator(s) {
                Ok(v)
            } else if let Some(c) = params.lookup(s) {
                Ok(ring.scalar(c))
            } else {
                Err(LineError::new(*col, format!("unknown symbol `{s}`")))
            }
        }
        Expr::Call(f, arg, col) => {
            let a = eval(ring, params, arg)?;
            ring.call(f, &a).map_err(|m| LineError::new(*col, m))
        }
        Expr::Neg(a) => Ok(ring.scale(&eval(ring, params, a)?, &-Scalar::one())),
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let x = eval(ring, params, a)?;
            let mut y = eval(ring, params, b)?;
            if matches!(e, Expr::Sub(..)) {
                y = ring.scale(&y, &-Scalar::one());
            }
            ring.add(&x, &y).map_err(|m| LineError::new(expr_col(a), m))
        }
        Expr::Mul(a, b) => {
            let x = eval(ring, params, a)?;
            let y = eval(ring, params, b)?;
            ring.mul(&x, &y).map_err(|m| LineError::new(expr_col(a), m))
        }
        Expr::Div(a, b, col) => {
            let x = eval(ring, params, a)?;
            let y = eval(ring, params, b)?;
            let inv = ring
                .as_scalar(&y)
                .and_then(|c| c.try_inverse())
                .ok_or_else(|| LineError::new(*col, "can only divide by an invertible scalar"))?;
            Ok(ring.scale(&x, &inv))
        }
        Expr::Pow(a, n, col) => {
            let x = eval(ring, params, a)?;
            if *n < 0 {
                let inv = ring
                    .as_scalar(&x)
                    .and_then(|c| c.try_inverse())
                    .ok_or_else(|| LineError::new(*col, "negative powers need an invertible scalar"))?;
                let mut out = Scalar::one();
                for _ in 0..(-*n) {
                    out = out * inv.clone();
                }
                return Ok(ring.scalar(out));
            }
            let mut out = ring.scalar(Scalar::one());
            for _ in 0..*n {
                out = ring.mul(&out, &x).map_err(|m| LineError::new(*col, m))?;
            }
            Ok(out)
        }
    }
}

fn expr_col(e: &Expr) -> usize {
    match e {
        Expr::Ident(_, c) | Expr::Call(_, _, c) | Expr::Div(_, _, c) | Expr::Pow(_, _, c) => *c,
        Expr::Neg(a) | Expr::Add(a, _) | Expr::Sub(a, _) | Expr::Mul(a, _) => expr_col(a),
        Expr::Num(_) => 1,
    }
}

/// Noncommutative polynomials before a presentation exists; used for the
/// right-hand sides of rewrite rules.
pub struct FreeRing<'a> {
    pub generators: &'a [String],
}

impl Ring for FreeRing<'_> {
    type V = BTreeMap<Word, Scalar>;

    fn scalar(&self, c: Scalar) -> Self::V {
        let mut m = BTreeMap::new();
        add_into(&mut m, Word::empty(), c);
        m
    }

    fn generator(&self, name: &str) -> Option<Self::V> {
        let i = self.generators.iter().position(|g| g == name)?;
        Some(BTreeMap::from([(Word::letter(i as Gen), Scalar::one())]))
    }

    fn add(&self, a: &Self::V, b: &Self::V) -> Result<Self::V, String> {
        let mut out = a.clone();
        for (w, c) in b {
            add_into(&mut out, w.clone(), c.clone());
        }
        Ok(out)
    }

    fn mul(&self, a: &Self::V, b: &Self::V) -> Result<Self::V, String> {
        let mut out = BTreeMap::new();
        for (u, c) in a {
            for (v, d) in b {
                add_into(&mut out, u.concat(v), c.clone() * d.clone());
            }
        }
        Ok(out)
    }

    fn scale(&self, a: &Self::V, c: &Scalar) -> Self::V {
        let mut out = BTreeMap::new();
        for (w, d) in a {
            add_into(&mut out, w.clone(), c.clone() * d.clone());
        }
        out
    }

    fn as_scalar(&self, v: &Self::V) -> Option<Scalar> {
        match v.len() {
            0 => Some(Scalar::zero()),
            1 => v.get(&Word::empty()).cloned(),
            _ => None,
        }
    }
}

/// Normal-form elements of a presented algebra.
pub struct ElementRing<'a>(pub &'a Arc<Presentation<Scalar>>);

impl Ring for ElementRing<'_> {
    type V = Element<Scalar>;

    fn scalar(&self, c: Scalar) -> Self::V {
        Element::scalar(self.0, c)
    }

    fn generator(&self, name: &str) -> Option<Self::V> {
        Element::generator(self.0, name).ok()
    }

    fn add(&self, a: &Self::V, b: &Self::V) -> Result<Self::V, String> {
        a.try_add(b).map_err(|e| e.to_string())
    }

    fn mul(&self, a: &Self::V, b: &Self::V) -> Result<Self::V, String> {
        a.try_mul(b).map_err(|e| e.to_string())
    }

    fn scale(&self, a: &Self::V, c: &Scalar) -> Self::V {
        a.scale(c)
    }

    fn as_scalar(&self, v: &Self::V) -> Option<Scalar> {
        if v.is_zero() {
            return Some(Scalar::zero());
        }
        (v.terms().len() == 1).then(|| v.coefficient(&Word::empty())).filter(|c| !c.is_zero())
    }
}

/// Universal forms over a presented algebra, with `d(...)`.
pub struct FormRing<'a>(pub &'a Arc<Presentation<Scalar>>);

impl Ring for FormRing<'_> {
    type V = Form<Scalar>;

    fn scalar(&self, c: Scalar) -> Self::V {
        Form::function(&Element::scalar(self.0, c))
    }

    fn generator(&self, name: &str) -> Option<Self::V> {
        Element::generator(self.0, name).ok().map(|e| Form::function(&e))
    }

    fn add(&self, a: &Self::V, b: &Self::V) -> Result<Self::V, String> {
        a.try_add(b).map_err(|e| e.to_string())
    }

    fn mul(&self, a: &Self::V, b: &Self::V) -> Result<Self::V, String> {
        a.try_mul(b).map_err(|e| e.to_string())
    }

    fn scale(&self, a: &Self::V, c: &Scalar) -> Self::V {
        a.scale(c)
    }

    fn as_scalar(&self, v: &Self::V) -> Option<Scalar> {
        if v.is_zero() {
            return Some(Scalar::zero());
        }
        if v.degree() != 0 || v.terms().len() != 1 {
            return None;
        }
        v.terms().get(&vec![Word::empty()]).cloned()
    }

    fn call(&self, name: &str, arg: &Self::V) -> Result<Self::V, String> {
        match name {
            "d" => Ok(arg.d()),
            _ => Err(format!("unknown function `{name}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_params() -> (Vec<String>, BTreeMap<String, BigRational>) {
        (vec!["q".to_string()], BTreeMap::new())
    }

    #[test]
    fn rule_right_hand_sides() {
        let gens = vec!["x".to_string(), "x*".to_string(), "y".to_string()];
        let (declared, set) = no_params();
        let params = Params { declared: &declared, set: &set };
        let e = parse_expr("q^-1 x y + (1 - q) 1", 1).unwrap();
        let v = eval(&FreeRing { generators: &gens }, &params, &e).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[&Word::new(vec![0, 2])], Scalar::param("q", -1));
        let e = parse_expr("1/2 x*", 1).unwrap();
        let v = eval(&FreeRing { generators: &gens }, &params, &e).unwrap();
        assert_eq!(v[&Word::letter(1)].to_string(), "1/2");
    }

    #[test]
    fn errors_carry_columns() {
        let err = parse_expr("x + ) y", 5).unwrap_err();
        assert_eq!(err.col, 9);
        let gens = vec!["x".to_string()];
        let (declared, set) = no_params();
        let params = Params { declared: &declared, set: &set };
        let e = parse_expr("x zz", 1).unwrap();
        let err = eval(&FreeRing { generators: &gens }, &params, &e).unwrap_err();
        assert_eq!(err, LineError::new(3, "unknown symbol `zz`"));
    }

    #[test]
    fn tensor_marks() {
        let t = parse_tensor("alpha (x) alpha - nu gamma* (x) gamma", 1).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t[1].0);
        assert_eq!(t[1].1.len(), 2);
        // outside tensor context `(x)` is a parenthesized generator
        assert!(parse_expr("2 (x)", 1).is_ok());
    }
}
