use serde::{Deserialize, Serialize};

use super::{descending_order, Matroid, MatroidExt};
use crate::error::{invalid, Error, Result};
use crate::set::{ElementId, ElementSet};

/// For bases `A`, `B` and `x ∈ A \ B`, the first `y ∈ B \ A` (ascending id)
/// such that `A - x + y` and `B - y + x` are both bases.
pub fn strong_exchange<M: Matroid + ?Sized>(
    m: &M,
    a: &ElementSet,
    b: &ElementSet,
    x: ElementId,
) -> Result<ElementId> {
    m.require_basis(a, "A")?;
    m.require_basis(b, "B")?;
    m.check_element(x)?;
    if !a.contains(x) || b.contains(x) {
        return invalid(format!("element {x} is not in A \\ B"));
    }
    exchange_unchecked(m, a, b, x)
}

fn exchange_unchecked<M: Matroid + ?Sized>(
    m: &M,
    a: &ElementSet,
    b: &ElementSet,
    x: ElementId,
) -> Result<ElementId> {
    // both sides keep their cardinality, so independence means basis
    let a_minus = a.without(x);
    for y in b.difference(a).iter() {
        if m.independent(&a_minus.with(y)) && m.independent(&b.without(y).with(x)) {
            return Ok(y);
        }
    }
    Err(Error::Invariant(format!(
        "no strong exchange partner for element {x}"
    )))
}

/// A bijection between two bases, stored as `(a, f(a))` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeMap {
    pairs: Vec<(ElementId, ElementId)>,
}

impl ExchangeMap {
    pub fn pairs(&self) -> &[(ElementId, ElementId)] {
        &self.pairs
    }

    pub fn get(&self, a: ElementId) -> Option<ElementId> {
        self.pairs.iter().find(|p| p.0 == a).map(|p| p.1)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Maps the greedy max-weight basis `A` onto another basis `B` so that
/// `w(f(a)) <= w(a)`, `B - f(a) + a` is a basis, and `f` fixes `A ∩ B`.
///
/// Elements of `A` are visited from lightest to heaviest, each one swapped
/// into the running basis by a strong exchange against `B`.
pub fn monotone_exchange_bijection<M, W>(
    m: &M,
    weights: &[W],
    a: &ElementSet,
    b: &ElementSet,
) -> Result<ExchangeMap>
where
    M: Matroid + ?Sized,
    W: PartialOrd,
{
    let greedy = m.max_weight_basis(weights)?;
    m.check_set(a)?;
    if &greedy != a {
        return invalid("A is not the greedy max-weight basis for the weights");
    }
    m.require_basis(b, "B")?;

    let order: Vec<ElementId> = descending_order(weights)
        .into_iter()
        .filter(|&e| a.contains(e))
        .collect();
    let mut current = a.clone();
    let mut pairs = Vec::with_capacity(order.len());
    for &ai in order.iter().rev() {
        if current.contains(ai) && !b.contains(ai) {
            let bi = exchange_unchecked(m, &current, b, ai)?;
            current.remove(ai);
            current.insert(bi);
            pairs.push((ai, bi));
        } else {
            pairs.push((ai, ai));
        }
    }
    pairs.reverse();
    Ok(ExchangeMap { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{GraphicMatroid, UniformMatroid};

    #[test]
    fn uniform_exchange_takes_first_candidate() {
        let u = UniformMatroid::new(4, 2).unwrap();
        let a = u.set_of(&[0, 1]).unwrap();
        let b = u.set_of(&[2, 3]).unwrap();
        assert_eq!(strong_exchange(&u, &a, &b, 0).unwrap(), 2);
        assert!(strong_exchange(&u, &a, &b, 2).is_err());
        assert!(strong_exchange(&u, &u.set_of(&[0]).unwrap(), &b, 0).is_err());
    }

    #[test]
    fn triangle_with_pendant() {
        // triangle 0-1-2 plus pendant edge 2-3
        let g = GraphicMatroid::new(4, vec![(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let a = g.set_of(&[0, 1, 3]).unwrap();
        let b = g.set_of(&[1, 2, 3]).unwrap();
        let y = strong_exchange(&g, &a, &b, 0).unwrap();
        assert_eq!(y, 2);
        assert!(g.is_basis(&a.without(0).with(y)).unwrap());
        assert!(g.is_basis(&b.without(y).with(0)).unwrap());
    }

    #[test]
    fn bijection_identity_and_uniform() {
        let u = UniformMatroid::new(4, 2).unwrap();
        let w = [4.0, 3.0, 2.0, 1.0];
        let a = u.set_of(&[0, 1]).unwrap();
        let id = monotone_exchange_bijection(&u, &w, &a, &a).unwrap();
        assert!(id.pairs().iter().all(|(x, y)| x == y));

        let b = u.set_of(&[2, 3]).unwrap();
        let f = monotone_exchange_bijection(&u, &w, &a, &b).unwrap();
        assert_eq!(f.len(), 2);
        for &(x, y) in f.pairs() {
            assert!(w[y] <= w[x]);
            assert!(u.is_basis(&b.without(y).with(x)).unwrap());
        }
        let mut image: Vec<_> = f.pairs().iter().map(|p| p.1).collect();
        image.sort_unstable();
        assert_eq!(image, vec![2, 3]);

        let not_greedy = u.set_of(&[0, 2]).unwrap();
        assert!(monotone_exchange_bijection(&u, &w, &not_greedy, &b).is_err());
    }
}
