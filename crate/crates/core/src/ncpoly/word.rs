use std::cmp::Ordering;

/// Index of a generator inside its presentation; the index order is the
/// declared generator order.
pub type Gen = u16;

/// A word in the generators. Ordered graded-lexicographically: shorter words
/// first, equal lengths compared letter by letter.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Word(Vec<Gen>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Gen>) -> Self {
        Word(letters)
    }

    pub fn letter(g: Gen) -> Self {
        Word(vec![g])
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `self[..start] ++ middle ++ self[end..]`.
    pub fn splice(&self, start: usize, end: usize, middle: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() - (end - start) + middle.0.len());
        v.extend_from_slice(&self.0[..start]);
        v.extend_from_slice(&middle.0);
        v.extend_from_slice(&self.0[end..]);
        Word(v)
    }

    pub fn subword(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn push(&mut self, g: Gen) {
        self.0.push(g);
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn graded_before_lexicographic() {
        let a = Word::new(vec![2]);
        let b = Word::new(vec![0, 0]);
        assert!(a < b);
        assert!(Word::new(vec![0, 2]) < Word::new(vec![2, 0]));
        assert!(Word::empty() < a);
    }

    proptest! {
        #[test]
        fn order_is_compatible_with_concatenation(
            u in proptest::collection::vec(0u16..3, 0..4),
            v in proptest::collection::vec(0u16..3, 0..4),
            a in proptest::collection::vec(0u16..3, 0..3),
            b in proptest::collection::vec(0u16..3, 0..3),
        ) {
            let (u, v, a, b) = (Word::new(u), Word::new(v), Word::new(a), Word::new(b));
            let lhs = a.concat(&u).concat(&b);
            let rhs = a.concat(&v).concat(&b);
            prop_assert_eq!(u.cmp(&v), lhs.cmp(&rhs));
        }
    }
}
