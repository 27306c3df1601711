//! Protected-set selection.
//!
//! Starting from `S = ∅`, any `e ∈ N \ S` whose span probability exceeds `c`
//! joins `S`, until no element qualifies. Span probabilities only grow with
//! `S`, so the result is the smallest set closed under this rule and does
//! not depend on the scan order. [`select`] exploits this by adding every
//! qualifying element of a pass at once; [`select_in_order`] adds one
//! element at a time and exists to check the equivalence.

use crate::error::{invalid, Error, Result};
use crate::matroid::{Matroid, MatroidExt};
use crate::scalar::Scalar;
use crate::set::{ElementId, ElementSet};

use super::measure::{span_probabilities, EmpiricalMeasure, ExactMeasure, SpanMeasure};

fn check_inputs<M, S, P>(m: &M, measure: &P, candidates: &ElementSet) -> Result<()>
where
    M: Matroid + ?Sized,
    S: Scalar,
    P: SpanMeasure<S> + ?Sized,
{
    m.check_set(candidates)?;
    if measure.ground_size() != m.ground_size() {
        return Err(Error::LengthMismatch {
            expected: m.ground_size(),
            got: measure.ground_size(),
        });
    }
    Ok(())
}

/// The protected set of `candidates` at threshold `c`.
pub fn select<M, S, P>(m: &M, measure: &P, candidates: &ElementSet, c: &S) -> Result<ElementSet>
where
    M: Matroid + ?Sized,
    S: Scalar,
    P: SpanMeasure<S> + ?Sized,
{
    check_inputs(m, measure, candidates)?;
    let atoms = measure.atoms(candidates)?;
    let mut protected = m.empty_set();
    loop {
        let fresh: Vec<ElementId> = span_probabilities(m, &atoms, &protected, candidates)
            .into_iter()
            .filter(|(_, p)| p > c)
            .map(|(e, _)| e)
            .collect();
        if fresh.is_empty() {
            return Ok(protected);
        }
        for e in fresh {
            protected.insert(e);
        }
    }
}

/// Same fixed point, adding the first qualifying element of `order` each step.
pub fn select_in_order<M, S, P>(
    m: &M,
    measure: &P,
    candidates: &ElementSet,
    c: &S,
    order: &[ElementId],
) -> Result<ElementSet>
where
    M: Matroid + ?Sized,
    S: Scalar,
    P: SpanMeasure<S> + ?Sized,
{
    check_inputs(m, measure, candidates)?;
    let atoms = measure.atoms(candidates)?;
    let mut protected = m.empty_set();
    loop {
        let probs = span_probabilities(m, &atoms, &protected, candidates);
        let next = order.iter().copied().find(|&e| {
            probs
                .iter()
                .any(|(f, p)| *f == e && p > c)
        });
        match next {
            Some(e) => {
                protected.insert(e);
            }
            None => return Ok(protected),
        }
    }
}

/// Selection against exact span probabilities of a product measure.
pub fn select_exact<M, S>(m: &M, x: &ExactMeasure<S>, candidates: &ElementSet, c: &S) -> Result<ElementSet>
where
    M: Matroid + ?Sized,
    S: Scalar,
{
    select(m, x, candidates, c)
}

/// Selection against the empirical measure of `samples`.
pub fn select_sampled<M>(m: &M, samples: &[ElementSet], candidates: &ElementSet, c: f64) -> Result<ElementSet>
where
    M: Matroid + ?Sized,
{
    if samples.is_empty() {
        return invalid("sampled selection needs at least one sample");
    }
    let measure = EmpiricalMeasure::from_samples(m.ground_size(), samples)?;
    select(m, &measure, candidates, &c)
}
