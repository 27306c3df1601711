//! Arrival orders.

use rand::seq::SliceRandom;
use rand::Rng;
use sampled_prophet_core::ocrs::{span_probabilities, EmpiricalMeasure, Histogram, SpanMeasure};
use sampled_prophet_core::{ChainDecomposition, ElementId, Matroid, Result};

use crate::config::OrderMode;

/// An order resolved for one trained decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arrival {
    Fixed(Vec<ElementId>),
    /// Shuffled afresh in every trial.
    Shuffled(Vec<ElementId>),
}

impl Arrival {
    /// The order of one trial; draws from `rng` only when shuffling.
    pub fn for_trial<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<ElementId> {
        match self {
            Self::Fixed(order) => order.clone(),
            Self::Shuffled(base) => {
                let mut order = base.clone();
                order.shuffle(rng);
                order
            }
        }
    }
}

/// Resolves `mode` against the instance's own order `base`.
///
/// The adversarial heuristic needs a sample of active sets; `active` is
/// only consulted in that mode.
pub fn resolve<M: Matroid + ?Sized>(
    mode: &OrderMode,
    base: &[ElementId],
    m: &M,
    d: &ChainDecomposition,
    active: impl FnOnce() -> Result<Histogram>,
) -> Result<Arrival> {
    Ok(match mode {
        OrderMode::Identity => Arrival::Fixed(base.to_vec()),
        OrderMode::Fixed(order) => Arrival::Fixed(order.clone()),
        OrderMode::Reverse => Arrival::Fixed(base.iter().rev().copied().collect()),
        OrderMode::RandomPerTrial => Arrival::Shuffled(base.to_vec()),
        OrderMode::AdversarialHeuristic => Arrival::Fixed(exposure_order(m, d, active()?)?),
    })
}

/// Per-element probability of being spanned inside its own layer:
/// `Pr[e ∈ span(((R ∩ N_i) ∪ N_{i+1}) - e)]` for `e ∈ N_i \ N_{i+1}`.
/// Loops and elements of a failed chain get 1.
pub fn exposures<M: Matroid + ?Sized>(m: &M, d: &ChainDecomposition, active: Histogram) -> Result<Vec<f64>> {
    let mut exposure = vec![1.0; m.ground_size()];
    if !d.is_ok() {
        return Ok(exposure);
    }
    let measure = EmpiricalMeasure::from_histogram(active)?;
    for i in 0..d.depth() {
        let atoms = SpanMeasure::<f64>::atoms(&measure, &d.layers[i])?;
        for (e, p) in span_probabilities(m, &atoms, &d.layers[i + 1], &d.layers[i]) {
            exposure[e] = p;
        }
    }
    Ok(exposure)
}

/// Least exposed first, so the most exposed elements arrive last, after
/// their layer has filled up. Ties go to the smaller id.
pub fn exposure_order<M: Matroid + ?Sized>(m: &M, d: &ChainDecomposition, active: Histogram) -> Result<Vec<ElementId>> {
    let exposure = exposures(m, d, active)?;
    let mut order: Vec<ElementId> = (0..exposure.len()).collect();
    order.sort_by(|&a, &b| exposure[a].total_cmp(&exposure[b]).then(a.cmp(&b)));
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sampled_prophet_core::matroid::UniformMatroid;
    use sampled_prophet_core::{ElementSet, Streams};

    #[test]
    fn modes_resolve() {
        let m = UniformMatroid::new(3, 1).unwrap();
        let d = ChainDecomposition::single_layer(&m);
        let base = [0, 1, 2];
        let none = || unreachable!();
        assert_eq!(resolve(&OrderMode::Reverse, &base, &m, &d, none).unwrap(), Arrival::Fixed(vec![2, 1, 0]));
        let shuffled = resolve(&OrderMode::RandomPerTrial, &base, &m, &d, || unreachable!()).unwrap();
        let mut order = shuffled.for_trial(&mut Streams::new(1).rng(0));
        order.sort_unstable();
        assert_eq!(order, vec![0, 1, 2]);
    }

    #[test]
    fn most_exposed_arrives_last() {
        let m = UniformMatroid::new(3, 1).unwrap();
        let d = ChainDecomposition::single_layer(&m);
        // 0 and 1 are spanned in three atoms, 2 only in two
        let mut h = Histogram::new(3);
        h.add(&ElementSet::from_indices(3, [0, 2]).unwrap());
        h.add(&ElementSet::from_indices(3, [1, 2]).unwrap());
        h.add(&ElementSet::from_indices(3, [2]).unwrap());
        h.add(&ElementSet::empty(3));
        let order = exposure_order(&m, &d, h).unwrap();
        assert_eq!(order, vec![2, 0, 1]);
    }
}
