use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::memo::Memo;
use crate::scalar::Coeff;

use super::word::{Gen, Word};

/// Default number of rewrite steps a single normalization may take.
pub const DEFAULT_REWRITE_BUDGET: usize = 2_000_000;

/// Oriented rewrite rule `lhs -> sum c_k w_k` with every `w_k < lhs`.
#[derive(Clone, Debug)]
pub struct Rule<R> {
    pub lhs: Word,
    pub rhs: Vec<(Word, R)>,
}

/// Finitely presented *-algebra: generators, an optional involution on them,
/// and degree-lowering rewrite rules.
#[derive(Debug)]
pub struct Presentation<R> {
    name: String,
    params: Vec<String>,
    generators: Vec<String>,
    index: HashMap<String, Gen>,
    star: Option<Vec<Gen>>,
    rules: Vec<Rule<R>>,
    redex: HashMap<Word, usize>,
    lhs_lengths: Vec<usize>,
    budget: usize,
    normal_forms: Memo<Word, Arc<Vec<(Word, R)>>>,
}

pub type NormalForm<R> = Arc<Vec<(Word, R)>>;

/// Incremental construction of a [`Presentation`].
pub struct PresentationBuilder<R> {
    name: String,
    params: Vec<String>,
    generators: Vec<String>,
    star_pairs: Vec<(String, String)>,
    rules: Vec<(String, Vec<(R, String)>)>,
    word_rules: Vec<Rule<R>>,
    budget: usize,
}

impl<R: Coeff> PresentationBuilder<R> {
    pub fn new(name: &str, generators: &[&str]) -> Self {
        PresentationBuilder {
            name: name.to_string(),
            params: Vec::new(),
            generators: generators.iter().map(|g| g.to_string()).collect(),
            star_pairs: Vec::new(),
            rules: Vec::new(),
            word_rules: Vec::new(),
            budget: DEFAULT_REWRITE_BUDGET,
        }
    }

    pub fn params(mut self, params: &[&str]) -> Self {
        self.params = params.iter().map(|p| p.to_string()).collect();
        self
    }

    /// Declares `a* = b` (and hence `b* = a`).
    pub fn star(mut self, a: &str, b: &str) -> Self {
        self.star_pairs.push((a.to_string(), b.to_string()));
        self
    }

    /// Adds a rule with space-separated generator names; `1` is the empty word.
    pub fn rule(mut self, lhs: &str, rhs: Vec<(R, &str)>) -> Self {
        self.rules
            .push((lhs.to_string(), rhs.into_iter().map(|(c, w)| (c, w.to_string())).collect()));
        self
    }

    pub fn word_rule(mut self, rule: Rule<R>) -> Self {
        self.word_rules.push(rule);
        self
    }

    pub fn budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn build(self) -> Result<Arc<Presentation<R>>> {
        let invalid = |reason: String| Error::InvalidPresentation {
            name: self.name.clone(),
            reason,
        };
        if self.generators.is_empty() {
            return Err(invalid("empty generator list".into()));
        }
        if self.generators.len() > Gen::MAX as usize {
            return Err(invalid("too many generators".into()));
        }
        let mut index = HashMap::new();
        for (i, g) in self.generators.iter().enumerate() {
            if index.insert(g.clone(), i as Gen).is_some() {
                return Err(invalid(format!("generator `{g}` declared twice")));
            }
            if self.params.contains(g) {
                return Err(invalid(format!("`{g}` is both a generator and a parameter")));
            }
        }
        let lookup = |g: &str| index.get(g).copied().ok_or_else(|| Error::UnknownGenerator(g.to_string()));
        let parse_word = |text: &str| -> Result<Word> {
            let mut w = Word::empty();
            for tok in text.split_whitespace() {
                if tok == "1" {
                    continue;
                }
                w.push(lookup(tok)?);
            }
            Ok(w)
        };

        let star = if self.star_pairs.is_empty() {
            None
        } else {
            let mut table: Vec<Option<Gen>> = vec![None; self.generators.len()];
            for (a, b) in &self.star_pairs {
                let (ia, ib) = (lookup(a)?, lookup(b)?);
                for (from, to) in [(ia, ib), (ib, ia)] {
                    match table[from as usize] {
                        Some(prev) if prev != to => {
                            return Err(invalid(format!(
                                "star of `{}` declared inconsistently",
                                self.generators[from as usize]
                            )))
                        }
                        _ => table[from as usize] = Some(to),
                    }
                }
            }
            let mut out = Vec::with_capacity(table.len());
            for (i, t) in table.into_iter().enumerate() {
                out.push(t.ok_or_else(|| {
                    invalid(format!("generator `{}` has no star partner", self.generators[i]))
                })?);
            }
            Some(out)
        };

        let mut rules = self.word_rules;
        for (lhs, rhs) in &self.rules {
            let lhs = parse_word(lhs)?;
            let mut terms = Vec::new();
            for (c, w) in rhs {
                terms.push((parse_word(w)?, c.clone()));
            }
            rules.push(Rule { lhs, rhs: terms });
        }
        let mut redex = HashMap::new();
        let mut lengths = BTreeSet::new();
        for (k, rule) in rules.iter_mut().enumerate() {
            if rule.lhs.is_empty() {
                return Err(invalid("rule with empty left-hand side".into()));
            }
            rule.rhs.retain(|(_, c)| !c.is_zero());
            // merge repeated words on the right
            let mut merged: BTreeMap<Word, R> = BTreeMap::new();
            for (w, c) in rule.rhs.drain(..) {
                add_into(&mut merged, w, c);
            }
            rule.rhs = merged.into_iter().collect();
            for (w, _) in &rule.rhs {
                if *w >= rule.lhs {
                    return Err(invalid(format!(
                        "rule {k} is not degree-lowering: right-hand word of length {} is not below its left-hand side",
                        w.len()
                    )));
                }
            }
            redex.entry(rule.lhs.clone()).or_insert(k);
            lengths.insert(rule.lhs.len());
        }

        Ok(Arc::new(Presentation {
            name: self.name,
            params: self.params,
            generators: self.generators,
            index,
            star,
            rules,
            redex,
            lhs_lengths: lengths.into_iter().collect(),
            budget: self.budget,
            normal_forms: Memo::new(),
        }))
    }
}

pub(crate) fn add_into<K: Ord, R: Coeff>(map: &mut BTreeMap<K, R>, w: K, c: R) {
    if c.is_zero() {
        return;
    }
    match map.remove(&w) {
        Some(old) => {
            let s = old + c;
            if !s.is_zero() {
                map.insert(w, s);
            }
        }
        None => {
            map.insert(w, c);
        }
    }
}

impl<R: Coeff> Presentation<R> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<Gen> {
        self.index.get(name).copied()
    }

    pub fn generator_name(&self, g: Gen) -> &str {
        &self.generators[g as usize]
    }

    pub fn rules(&self) -> &[Rule<R>] {
        &self.rules
    }

    pub fn has_star(&self) -> bool {
        self.star.is_some()
    }

    pub fn star_of(&self, g: Gen) -> Option<Gen> {
        self.star.as_ref().map(|s| s[g as usize])
    }

    /// Generator pairs `(g, g*)` with `g <= g*`, in generator order.
    pub fn star_pairs(&self) -> Vec<(Gen, Gen)> {
        match &self.star {
            None => Vec::new(),
            Some(s) => s
                .iter()
                .enumerate()
                .filter(|(i, t)| *i as Gen <= **t)
                .map(|(i, t)| (i as Gen, *t))
                .collect(),
        }
    }

    pub fn word_string(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.letters()
            .iter()
            .map(|g| self.generator_name(*g))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut w = Word::empty();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            w.push(self.generator(tok).ok_or_else(|| Error::UnknownGenerator(tok.to_string()))?);
        }
        Ok(w)
    }

    /// Leftmost (then shortest) occurrence of a rule's left-hand side.
    pub fn find_redex(&self, w: &Word) -> Option<(usize, &Rule<R>)> {
        let letters = w.letters();
        for pos in 0..letters.len() {
            for &len in &self.lhs_lengths {
                if pos + len > letters.len() {
                    break;
                }
                let sub = Word::new(letters[pos..pos + len].to_vec());
                if let Some(&k) = self.redex.get(&sub) {
                    return Some((pos, &self.rules[k]));
                }
            }
        }
        None
    }

    pub fn is_irreducible(&self, w: &Word) -> bool {
        self.find_redex(w).is_none()
    }

    /// Normal form of a single word, as a sorted list of irreducible words.
    pub fn normalize_word(&self, w: &Word) -> Result<NormalForm<R>> {
        if let Some(nf) = self.normal_forms.get(w) {
            return Ok(nf);
        }
        let mut pending: BTreeMap<Word, R> = BTreeMap::new();
        pending.insert(w.clone(), R::one());
        let mut out: BTreeMap<Word, R> = BTreeMap::new();
        let mut steps = 0usize;
        while let Some((u, c)) = pending.pop_last() {
            if u != *w {
                if let Some(nf) = self.normal_forms.get(&u) {
                    for (v, d) in nf.iter() {
                        add_into(&mut out, v.clone(), c.clone() * d.clone());
                    }
                    continue;
                }
            }
            match self.find_redex(&u) {
                None => add_into(&mut out, u, c),
                Some((pos, rule)) => {
                    steps += 1;
                    if steps > self.budget {
                        return Err(Error::RewriteBudget {
                            word: self.word_string(w),
                            budget: self.budget,
                        });
                    }
                    let end = pos + rule.lhs.len();
                    for (v, d) in &rule.rhs {
                        add_into(&mut pending, u.splice(pos, end, v), c.clone() * d.clone());
                    }
                }
            }
        }
        let nf: NormalForm<R> = Arc::new(out.into_iter().collect());
        self.normal_forms.insert(w.clone(), nf.clone());
        Ok(nf)
    }

    /// Infallible variant used by the arithmetic. Rules are validated to be
    /// strictly decreasing in a well-order, so rewriting terminates; the budget
    /// only trips on pathological inputs.
    pub(crate) fn nf(&self, w: &Word) -> NormalForm<R> {
        match self.normalize_word(w) {
            Ok(nf) => nf,
            Err(e) => panic!("{e}"),
        }
    }

    /// All irreducible words of length at most `degree`, in graded
    /// lexicographic order.
    pub fn normal_words(&self, degree: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..degree {
            let mut next = Vec::new();
            for w in &layer {
                for g in 0..self.generators.len() as Gen {
                    let mut v = w.clone();
                    v.push(g);
                    if self.suffix_irreducible(&v) {
                        next.push(v);
                    }
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    // `w` minus its last letter is known irreducible; only redexes ending at
    // the last position need checking.
    fn suffix_irreducible(&self, w: &Word) -> bool {
        let n = w.len();
        self.lhs_lengths
            .iter()
            .filter(|&&len| len <= n)
            .all(|&len| !self.redex.contains_key(&w.subword(n - len, n)))
    }

    /// Same presentation with every coefficient passed through `f`.
    pub fn map_coeffs<S: Coeff>(&self, f: &impl Fn(&R) -> S) -> Result<Arc<Presentation<S>>> {
        let mut b = PresentationBuilder::<S>::new(
            &self.name,
            &self.generators.iter().map(String::as_str).collect::<Vec<_>>(),
        )
        .params(&self.params.iter().map(String::as_str).collect::<Vec<_>>())
        .budget(self.budget);
        for (g, h) in self.star_pairs() {
            b = b.star(self.generator_name(g), self.generator_name(h));
        }
        for rule in &self.rules {
            b = b.word_rule(Rule {
                lhs: rule.lhs.clone(),
                rhs: rule.rhs.iter().map(|(w, c)| (w.clone(), f(c))).collect(),
            });
        }
        b.build()
    }
}
