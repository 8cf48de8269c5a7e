//! Binary relations on a dense vertex range `0..n`, stored as packed bit rows.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

const WORD: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// A set of ordered pairs `(i, j)` with `i, j < n`.
///
/// Row `i` is a bitset of every `j` with `(i, j)` in the relation, so
/// composition and neighborhood intersection reduce to word-wise `|` and `&`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PairRelation {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl PairRelation {
    /// The empty relation on `n` vertices.
    pub fn empty(n: usize) -> Self {
        let words = words_for(n);
        Self {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    /// Builds a relation from pairs. Duplicates are merged; use
    /// [`PairRelation::from_unique_pairs`] when they must be rejected.
    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rel = Self::empty(n);
        for (i, j) in pairs {
            rel.check(i, j)?;
            rel.insert(i, j);
        }
        Ok(rel)
    }

    /// Like [`PairRelation::from_pairs`] but a repeated pair is an error.
    pub fn from_unique_pairs<I>(n: usize, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rel = Self::empty(n);
        for (i, j) in pairs {
            rel.check(i, j)?;
            if !rel.insert(i, j) {
                return Err(GraphError::DuplicatePair(i, j));
            }
        }
        Ok(rel)
    }

    fn check(&self, i: usize, j: usize) -> Result<(), GraphError> {
        for v in [i, j] {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.bits[i * self.words + j / WORD] >> (j % WORD) & 1 == 1
    }

    /// Inserts `(i, j)`, returning `true` if it was not already present.
    ///
    /// Panics if either endpoint is out of range.
    #[inline]
    pub fn insert(&mut self, i: usize, j: usize) -> bool {
        assert!(
            i < self.n && j < self.n,
            "pair ({i}, {j}) out of range for n = {}",
            self.n
        );
        let w = &mut self.bits[i * self.words + j / WORD];
        let mask = 1u64 << (j % WORD);
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }

    /// Removes `(i, j)`, returning `true` if it was present.
    pub fn remove(&mut self, i: usize, j: usize) -> bool {
        if !self.contains(i, j) {
            return false;
        }
        self.bits[i * self.words + j / WORD] &= !(1u64 << (j % WORD));
        true
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Number of pairs.
    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Number of pairs in row `i`.
    pub fn row_len(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Iterates the second coordinates of row `i` in increasing order.
    pub fn row_iter(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(wi, &w)| BitIter {
            word: w,
            base: wi * WORD,
        })
    }

    /// Iterates all pairs in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.row_iter(i).map(move |j| (i, j)))
    }

    /// `true` when rows `a` and `b` share a column.
    #[inline]
    pub(crate) fn rows_intersect(&self, a: usize, b: usize) -> bool {
        self.row(a).iter().zip(self.row(b)).any(|(x, y)| x & y != 0)
    }

    /// The opposite relation `{(j, i) : (i, j) in self}`.
    pub fn opposite(&self) -> Self {
        let mut out = Self::empty(self.n);
        for (i, j) in self.iter() {
            out.insert(j, i);
        }
        out
    }

    /// Relational composition: `(a, c)` is in `self.compose(s)` iff some `b`
    /// has `(a, b)` in `self` and `(b, c)` in `s`.
    pub fn compose(&self, s: &PairRelation) -> Result<Self, GraphError> {
        if self.n != s.n {
            return Err(GraphError::SizeMismatch {
                left: self.n,
                right: s.n,
            });
        }
        let mut out = Self::empty(self.n);
        for a in 0..self.n {
            for b in self.row_iter(a) {
                let src = s.row(b);
                for (dst, &w) in out.row_mut(a).iter_mut().zip(src) {
                    *dst |= w;
                }
            }
        }
        Ok(out)
    }

    /// Union in place. Panics on mismatched sizes.
    pub fn union_with(&mut self, other: &PairRelation) {
        assert_eq!(self.n, other.n, "union of relations on different vertex counts");
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &PairRelation) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Pairs of `self` missing from `other`, in lexicographic order.
    pub fn difference(&self, other: &PairRelation) -> Vec<(usize, usize)> {
        self.iter().filter(|&(i, j)| !other.contains(i, j)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.iter().all(|(i, j)| self.contains(j, i))
    }

    pub fn to_pairs(&self) -> Vec<(usize, usize)> {
        self.iter().collect()
    }
}

struct BitIter {
    word: u64,
    base: usize,
}

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}

impl fmt::Debug for PairRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PairRelation")
            .field("n", &self.n)
            .field("pairs", &self.to_pairs())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct RelationRepr {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl Serialize for PairRelation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RelationRepr {
            n: self.n,
            pairs: self.to_pairs(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PairRelation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = RelationRepr::deserialize(deserializer)?;
        PairRelation::from_unique_pairs(repr.n, repr.pairs).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(n: usize, pairs: &[(usize, usize)]) -> PairRelation {
        PairRelation::from_pairs(n, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn opposite_examples() {
        assert_eq!(rel(2, &[(0, 1)]).opposite(), rel(2, &[(1, 0)]));
        assert_eq!(rel(3, &[]).opposite(), rel(3, &[]));
        let sym = rel(2, &[(0, 1), (1, 0)]);
        assert_eq!(sym.opposite(), sym);
    }

    #[test]
    fn compose_examples() {
        let r = rel(3, &[(0, 1)]);
        assert_eq!(r.compose(&rel(3, &[(1, 2)])).unwrap(), rel(3, &[(0, 2)]));
        assert!(r.compose(&rel(3, &[(0, 1)])).unwrap().is_empty());

        let r = rel(3, &[(0, 1), (2, 1)]);
        let got = r.compose(&r.opposite()).unwrap();
        assert_eq!(got, rel(3, &[(0, 0), (0, 2), (2, 0), (2, 2)]));
    }

    #[test]
    fn compose_rejects_mismatched_sizes() {
        let err = rel(2, &[]).compose(&rel(3, &[])).unwrap_err();
        assert!(matches!(err, GraphError::SizeMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn wide_rows_span_words() {
        let n = 130;
        let mut r = PairRelation::empty(n);
        r.insert(0, 129);
        r.insert(0, 64);
        r.insert(129, 0);
        assert_eq!(r.row_iter(0).collect::<Vec<_>>(), vec![64, 129]);
        assert_eq!(r.len(), 3);
        assert!(r.remove(0, 64));
        assert!(!r.remove(0, 64));
        assert_eq!(r.opposite().to_pairs(), vec![(0, 129), (129, 0)]);
    }

    #[test]
    fn unique_pairs_rejects_duplicates() {
        let err = PairRelation::from_unique_pairs(2, [(0, 1), (0, 1)]).unwrap_err();
        assert!(matches!(err, GraphError::DuplicatePair(0, 1)));
        let err = PairRelation::from_pairs(2, [(0, 2)]).unwrap_err();
        assert!(matches!(err, GraphError::VertexOutOfRange { vertex: 2, n: 2 }));
    }
}
