//! Online greedy over the layers of a chain decomposition.
//!
//! An element of `N_i \ N_{i+1}` is accepted when it is independent of the
//! layer's earlier acceptances in `M|N_i / N_{i+1}`, i.e. together with a
//! basis of `N_{i+1}`.

use crate::error::{invalid, Error, Result};
use crate::matroid::{Matroid, MatroidExt};
use crate::set::{ElementId, ElementSet};

use super::decompose::ChainDecomposition;

/// Per-trial acceptance state.
pub struct LayeredGreedy<'a, M: ?Sized> {
    m: &'a M,
    layer_of: Vec<Option<usize>>,
    below: Vec<ElementSet>,
    accepted: Vec<ElementSet>,
    loops: ElementSet,
}

impl<'a, M: Matroid + ?Sized> LayeredGreedy<'a, M> {
    pub fn new(m: &'a M, d: &ChainDecomposition) -> Result<Self> {
        if !d.is_ok() {
            return invalid("layered greedy needs a successful decomposition");
        }
        let n = m.ground_size();
        let mut layer_of = vec![None; n];
        for (e, slot) in layer_of.iter_mut().enumerate() {
            *slot = d.layer_of(e);
        }
        let below = (0..d.depth()).map(|i| m.basis_of(&d.layers[i + 1])).collect();
        Ok(Self {
            m,
            layer_of,
            below,
            accepted: vec![m.empty_set(); d.depth()],
            loops: d.loops.clone(),
        })
    }

    /// Offers an active element; returns whether it was accepted.
    pub fn offer(&mut self, e: ElementId) -> Result<bool> {
        self.m.check_element(e)?;
        let Some(i) = self.layer_of[e] else {
            if self.loops.contains(e) {
                return Ok(false);
            }
            return Err(Error::Invariant(format!("element {e} lies in no layer")));
        };
        let mut probe = self.accepted[i].with(e);
        probe.union_with(&self.below[i]);
        if self.m.independent(&probe) {
            self.accepted[i].insert(e);
            return Ok(true);
        }
        Ok(false)
    }

    /// Forgets all acceptances, for reuse across trials.
    pub fn reset(&mut self) {
        for a in &mut self.accepted {
            a.clear();
        }
    }

    /// Acceptances of layer `i`.
    pub fn layer_accepted(&self, i: usize) -> &ElementSet {
        &self.accepted[i]
    }

    pub fn accepted(&self) -> ElementSet {
        let mut all = self.m.empty_set();
        for a in &self.accepted {
            all.union_with(a);
        }
        all
    }
}

/// One pass over `order`, offering the active elements.
pub fn run_layered_greedy<M: Matroid + ?Sized>(
    m: &M,
    d: &ChainDecomposition,
    active: &ElementSet,
    order: &[ElementId],
) -> Result<ElementSet> {
    let mut greedy = LayeredGreedy::new(m, d)?;
    for &e in order {
        if active.contains(e) {
            greedy.offer(e)?;
        }
    }
    Ok(greedy.accepted())
}
