//! Subsets of a ground set `[0, n)` with bitset semantics.
//!
//! Sets up to 128 elements live inline; larger universes spill to the heap.

use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

/// Index of an element of the ground set.
pub type ElementId = usize;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElementSet {
    universe: usize,
    words: SmallVec<[u64; 2]>,
}

fn word_count(universe: usize) -> usize {
    universe.div_ceil(WORD)
}

impl ElementSet {
    pub fn empty(universe: usize) -> Self {
        Self {
            universe,
            words: smallvec![0; word_count(universe)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for (i, w) in set.words.iter_mut().enumerate() {
            let remaining = universe - i * WORD;
            *w = if remaining >= WORD {
                u64::MAX
            } else {
                (1u64 << remaining) - 1
            };
        }
        set
    }

    /// Builds a set, rejecting indices outside the universe.
    pub fn from_indices<I>(universe: usize, indices: I) -> Result<Self>
    where
        I: IntoIterator<Item = ElementId>,
    {
        let mut set = Self::empty(universe);
        for e in indices {
            if e >= universe {
                return Err(Error::OutOfRange {
                    element: e,
                    size: universe,
                });
            }
            set.insert(e);
        }
        Ok(set)
    }

    /// Builds a set from a bit mask; bits at or above `universe` are dropped.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        let mut set = Self::empty(universe);
        if let Some(w) = set.words.first_mut() {
            *w = if universe >= WORD {
                mask
            } else {
                mask & ((1u64 << universe) - 1)
            };
        }
        set
    }

    /// Low 64 bits of the membership vector.
    pub fn low_mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn contains(&self, e: ElementId) -> bool {
        e < self.universe && self.words[e / WORD] >> (e % WORD) & 1 == 1
    }

    /// Inserts `e`, returning whether it was newly added.
    ///
    /// Panics when `e` lies outside the universe.
    #[inline]
    pub fn insert(&mut self, e: ElementId) -> bool {
        assert!(e < self.universe, "element {e} outside universe {}", self.universe);
        let bit = 1u64 << (e % WORD);
        let w = &mut self.words[e / WORD];
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, e: ElementId) -> bool {
        if e >= self.universe {
            return false;
        }
        let bit = 1u64 << (e % WORD);
        let w = &mut self.words[e / WORD];
        let present = *w & bit != 0;
        *w &= !bit;
        present
    }

    pub fn with(&self, e: ElementId) -> Self {
        let mut s = self.clone();
        s.insert(e);
        s
    }

    pub fn without(&self, e: ElementId) -> Self {
        let mut s = self.clone();
        s.remove(e);
        s
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn max_element(&self) -> Option<ElementId> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * WORD + (WORD - 1 - w.leading_zeros() as usize))
    }

    fn zip_words(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        let universe = self.universe.max(other.universe);
        let mut out = Self::empty(universe);
        for (i, w) in out.words.iter_mut().enumerate() {
            let a = self.words.get(i).copied().unwrap_or(0);
            let b = other.words.get(i).copied().unwrap_or(0);
            *w = f(a, b);
        }
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_words(other, |a, b| a & !b)
    }

    pub fn union_with(&mut self, other: &Self) {
        assert!(other.universe <= self.universe, "union with a larger universe");
        for (w, o) in self.words.iter_mut().zip(other.words.iter()) {
            *w |= o;
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().enumerate().all(|(i, &a)| {
            let b = other.words.get(i).copied().unwrap_or(0);
            a & !b == 0
        })
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    pub fn to_vec(&self) -> Vec<ElementId> {
        self.iter().collect()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = ElementId;

    #[inline]
    fn next(&mut self) -> Option<ElementId> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + bit);
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

impl<'a> IntoIterator for &'a ElementSet {
    type Item = ElementId;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Serialize, Deserialize)]
struct SetRepr {
    universe: usize,
    elements: Vec<ElementId>,
}

impl Serialize for ElementSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SetRepr {
            universe: self.universe,
            elements: self.to_vec(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ElementSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SetRepr::deserialize(deserializer)?;
        ElementSet::from_indices(repr.universe, repr.elements).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_membership() {
        let mut s = ElementSet::empty(130);
        assert!(s.insert(0));
        assert!(s.insert(129));
        assert!(!s.insert(129));
        assert_eq!(s.len(), 2);
        assert_eq!(s.to_vec(), vec![0, 129]);
        assert_eq!(s.max_element(), Some(129));
        assert!(s.remove(0));
        assert!(!s.contains(0));
        assert_eq!(ElementSet::full(70).len(), 70);
        assert_eq!(ElementSet::full(64).len(), 64);
        assert!(ElementSet::from_indices(4, [4]).is_err());
    }

    #[test]
    fn set_algebra() {
        let a = ElementSet::from_indices(10, [1, 2, 3]).unwrap();
        let b = ElementSet::from_indices(10, [3, 4]).unwrap();
        assert_eq!(a.union(&b).to_vec(), vec![1, 2, 3, 4]);
        assert_eq!(a.intersection(&b).to_vec(), vec![3]);
        assert_eq!(a.difference(&b).to_vec(), vec![1, 2]);
        assert!(a.intersection(&b).is_subset(&a));
        assert!(!a.is_disjoint(&b));
    }

    proptest! {
        #[test]
        fn cardinality_matches_iteration(universe in 1usize..200, raw in proptest::collection::vec(0usize..200, 0..50)) {
            let items: Vec<_> = raw.into_iter().filter(|&e| e < universe).collect();
            let s = ElementSet::from_indices(universe, items.iter().copied()).unwrap();
            let mut dedup = items.clone();
            dedup.sort_unstable();
            dedup.dedup();
            prop_assert_eq!(s.len(), dedup.len());
            prop_assert_eq!(s.to_vec(), dedup);
            let json = serde_json::to_string(&s).unwrap();
            let back: ElementSet = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
