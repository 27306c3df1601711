//! Matroids given by an independence oracle.
//!
//! Everything else (rank, span, greedy, exchange) is derived from
//! [`Matroid::independent`], so restrictions, contractions and direct sums
//! compose without extra work.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::set::{ElementId, ElementSet};

mod exchange;
mod families;
mod polytope;
mod spec;

pub use exchange::{monotone_exchange_bijection, strong_exchange, ExchangeMap};
pub use families::{
    ConcreteMatroid, Contraction, DirectSum, GraphicMatroid, PartitionMatroid, Restriction,
    UniformMatroid,
};
pub use polytope::{in_polytope, polytope_slack, MAX_POLYTOPE_ELEMENTS};
pub use spec::MatroidSpec;

/// An independence oracle over the ground set `[0, n)`.
///
/// Implementations must be pure: the same set always gives the same answer.
pub trait Matroid: Send + Sync {
    fn ground_size(&self) -> usize;

    /// Independence test. Callers guarantee `set` lies within the ground set;
    /// use [`MatroidExt::is_independent`] for a checked version.
    fn independent(&self, set: &ElementSet) -> bool;
}

impl<M: Matroid + ?Sized> Matroid for &M {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn independent(&self, set: &ElementSet) -> bool {
        (**self).independent(set)
    }
}

impl<M: Matroid + ?Sized> Matroid for Box<M> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn independent(&self, set: &ElementSet) -> bool {
        (**self).independent(set)
    }
}

impl<M: Matroid + ?Sized> Matroid for Arc<M> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn independent(&self, set: &ElementSet) -> bool {
        (**self).independent(set)
    }
}

/// Descending weight order with ties broken by ascending element id.
pub fn descending_order<W: PartialOrd>(weights: &[W]) -> Vec<ElementId> {
    let mut order: Vec<ElementId> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        weights[b]
            .partial_cmp(&weights[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Operations derived from the independence oracle.
pub trait MatroidExt: Matroid {
    fn check_set(&self, set: &ElementSet) -> Result<()> {
        match set.max_element() {
            Some(e) if e >= self.ground_size() => Err(Error::OutOfRange {
                element: e,
                size: self.ground_size(),
            }),
            _ => Ok(()),
        }
    }

    fn check_element(&self, e: ElementId) -> Result<()> {
        if e >= self.ground_size() {
            return Err(Error::OutOfRange {
                element: e,
                size: self.ground_size(),
            });
        }
        Ok(())
    }

    fn empty_set(&self) -> ElementSet {
        ElementSet::empty(self.ground_size())
    }

    fn ground_set(&self) -> ElementSet {
        ElementSet::full(self.ground_size())
    }

    fn is_independent(&self, set: &ElementSet) -> Result<bool> {
        self.check_set(set)?;
        Ok(self.independent(set))
    }

    /// Greedily extends the empty set along `order`.
    fn greedy<I: IntoIterator<Item = ElementId>>(&self, order: I) -> ElementSet {
        let mut basis = self.empty_set();
        for e in order {
            basis.insert(e);
            if !self.independent(&basis) {
                basis.remove(e);
            }
        }
        basis
    }

    /// A maximal independent subset of `set`, scanning in ascending id order.
    fn basis_of(&self, set: &ElementSet) -> ElementSet {
        self.greedy(set.iter())
    }

    fn rank(&self, set: &ElementSet) -> Result<usize> {
        self.check_set(set)?;
        Ok(self.basis_of(set).len())
    }

    fn full_rank(&self) -> usize {
        self.basis_of(&self.ground_set()).len()
    }

    fn is_basis(&self, set: &ElementSet) -> Result<bool> {
        self.check_set(set)?;
        Ok(self.independent(set) && set.len() == self.full_rank())
    }

    fn is_loop(&self, e: ElementId) -> bool {
        !self.independent(&self.empty_set().with(e))
    }

    fn loops(&self) -> ElementSet {
        let mut loops = self.empty_set();
        for e in 0..self.ground_size() {
            if self.is_loop(e) {
                loops.insert(e);
            }
        }
        loops
    }

    /// Whether `rank(set) == rank(set + e)`.
    fn span_contains(&self, set: &ElementSet, e: ElementId) -> Result<bool> {
        self.check_set(set)?;
        self.check_element(e)?;
        if set.contains(e) {
            return Ok(true);
        }
        let basis = self.basis_of(set);
        Ok(!self.independent(&basis.with(e)))
    }

    /// The elements `e` of `candidates` with `e ∈ span(set - e)`.
    ///
    /// One greedy pass over `set`; candidates outside `set` cost one oracle
    /// call each and members of the greedy basis are resolved through their
    /// fundamental circuits.
    fn spanned_elements(&self, set: &ElementSet, candidates: &ElementSet) -> ElementSet {
        let basis = self.basis_of(set);
        let outside_basis = set.difference(&basis);
        let mut spanned = self.empty_set();
        for e in candidates {
            let hit = if !set.contains(e) {
                !self.independent(&basis.with(e))
            } else if !basis.contains(e) {
                true
            } else {
                let reduced = basis.without(e);
                outside_basis
                    .iter()
                    .any(|f| self.independent(&reduced.with(f)))
            };
            if hit {
                spanned.insert(e);
            }
        }
        spanned
    }

    /// The unique max-weight basis under descending weights (ties by id).
    ///
    /// Zero-weight elements are still taken while they extend independence,
    /// so the result is always a basis.
    fn max_weight_basis<W: PartialOrd>(&self, weights: &[W]) -> Result<ElementSet> {
        if weights.len() != self.ground_size() {
            return Err(Error::LengthMismatch {
                expected: self.ground_size(),
                got: weights.len(),
            });
        }
        Ok(self.greedy(descending_order(weights)))
    }

    /// Checked conversion of an id list into a set over this ground set.
    fn set_of(&self, elements: &[ElementId]) -> Result<ElementSet> {
        ElementSet::from_indices(self.ground_size(), elements.iter().copied())
    }

    fn require_basis(&self, set: &ElementSet, what: &str) -> Result<()> {
        if !self.is_basis(set)? {
            return invalid(format!("{what} is not a basis"));
        }
        Ok(())
    }
}

impl<M: Matroid + ?Sized> MatroidExt for M {}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> GraphicMatroid {
        GraphicMatroid::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn independence_examples() {
        let u = UniformMatroid::new(4, 2).unwrap();
        assert!(u.is_independent(&u.set_of(&[0, 1]).unwrap()).unwrap());
        let g = triangle();
        assert!(!g.is_independent(&g.set_of(&[0, 1, 2]).unwrap()).unwrap());
        let p = PartitionMatroid::new(vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap();
        assert!(p.is_independent(&p.set_of(&[0, 2]).unwrap()).unwrap());
        assert!(!p.is_independent(&p.set_of(&[0, 1]).unwrap()).unwrap());
    }

    #[test]
    fn out_of_range_is_rejected() {
        let u = UniformMatroid::new(4, 2).unwrap();
        let big = ElementSet::from_indices(10, [7]).unwrap();
        assert!(matches!(u.is_independent(&big), Err(Error::OutOfRange { element: 7, .. })));
        assert!(u.rank(&big).is_err());
        assert!(u.span_contains(&u.empty_set(), 4).is_err());
    }

    #[test]
    fn rank_examples() {
        let u = UniformMatroid::new(5, 3).unwrap();
        assert_eq!(u.rank(&u.set_of(&[0, 1, 2, 3]).unwrap()).unwrap(), 3);
        let g = triangle();
        assert_eq!(g.rank(&g.ground_set()).unwrap(), 2);
        assert_eq!(g.rank(&g.empty_set()).unwrap(), 0);
        assert_eq!(u.rank(&u.empty_set()).unwrap(), 0);
    }

    #[test]
    fn span_examples() {
        let u = UniformMatroid::new(3, 1).unwrap();
        assert!(u.span_contains(&u.set_of(&[0]).unwrap(), 2).unwrap());
        let g = triangle();
        assert!(g.span_contains(&g.set_of(&[0, 1]).unwrap(), 2).unwrap());
        assert!(!g.span_contains(&g.empty_set(), 1).unwrap());
        assert!(g.span_contains(&g.set_of(&[1]).unwrap(), 1).unwrap());
    }

    #[test]
    fn max_weight_basis_examples() {
        let u = UniformMatroid::new(3, 1).unwrap();
        assert_eq!(u.max_weight_basis(&[5.0, 3.0, 2.0]).unwrap().to_vec(), vec![0]);
        let g = triangle();
        assert_eq!(g.max_weight_basis(&[3.0, 2.0, 1.0]).unwrap().to_vec(), vec![0, 1]);
        let p = PartitionMatroid::new(vec![vec![0, 1], vec![2]], vec![1, 1]).unwrap();
        assert_eq!(p.max_weight_basis(&[1.0, 9.0, 4.0]).unwrap().to_vec(), vec![1, 2]);
        assert!(matches!(
            p.max_weight_basis(&[1.0]),
            Err(Error::LengthMismatch { expected: 3, got: 1 })
        ));
        // real-valued ties resolve by ascending id, zero weights still fill the basis
        let u2 = UniformMatroid::new(4, 2).unwrap();
        assert_eq!(u2.max_weight_basis(&[0.0, 1.0, 1.0, 0.0]).unwrap().to_vec(), vec![1, 2]);
        assert_eq!(u2.max_weight_basis(&[0.0, 0.0, 0.0, 0.0]).unwrap().to_vec(), vec![0, 1]);
    }

    #[test]
    fn spanned_elements_match_definition() {
        let g = GraphicMatroid::new(4, vec![(0, 1), (1, 2), (0, 2), (2, 3), (2, 3)]).unwrap();
        for mask in 0u64..32 {
            let x = ElementSet::from_mask(5, mask);
            let got = g.spanned_elements(&x, &g.ground_set());
            for e in 0..5 {
                let rest = x.without(e);
                let expect = g.rank(&rest.with(e)).unwrap() == g.rank(&rest).unwrap();
                assert_eq!(got.contains(e), expect, "mask {mask:b} e {e}");
            }
        }
    }
}
