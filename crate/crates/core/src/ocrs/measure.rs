//! Probability measures over the active set restricted to a candidate set.
//!
//! Selection only ever asks one kind of question: with `R` drawn from the
//! measure, how likely is `e` spanned by `((R ∩ N) ∪ S) - e`. Every measure
//! here answers it through a list of weighted atoms of `R ∩ N`.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::matroid::{Matroid, MatroidExt, MAX_POLYTOPE_ELEMENTS};
use crate::rng::Streams;
use crate::scalar::Scalar;
use crate::set::{ElementId, ElementSet};

/// Largest candidate set the exact measure enumerates.
pub const MAX_EXACT_ELEMENTS: usize = MAX_POLYTOPE_ELEMENTS;

/// A distribution of `R ∩ N`, as (outcome, probability) pairs in a fixed order.
pub type Atoms<S> = Vec<(ElementSet, S)>;

pub trait SpanMeasure<S: Scalar>: Send + Sync {
    fn ground_size(&self) -> usize;

    /// Weighted outcomes of `R ∩ candidates`.
    fn atoms(&self, candidates: &ElementSet) -> Result<Atoms<S>>;
}

/// Product measure with known marginals, enumerated exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMeasure<S> {
    x: Vec<S>,
}

impl<S: Scalar> ExactMeasure<S> {
    pub fn new(x: Vec<S>) -> Result<Self> {
        if let Some(i) = x.iter().position(|p| !p.is_unit_interval()) {
            return invalid(format!("marginal {i} is {:?}, outside [0, 1]", x[i]));
        }
        Ok(Self { x })
    }

    pub fn marginals(&self) -> &[S] {
        &self.x
    }
}

impl<S: Scalar> SpanMeasure<S> for ExactMeasure<S> {
    fn ground_size(&self) -> usize {
        self.x.len()
    }

    fn atoms(&self, candidates: &ElementSet) -> Result<Atoms<S>> {
        let elems = candidates.to_vec();
        if elems.len() > MAX_EXACT_ELEMENTS {
            return Err(Error::Unsupported(format!(
                "exact span probabilities over {} candidates; the limit is {MAX_EXACT_ELEMENTS}",
                elems.len()
            )));
        }
        let universe = self.x.len();
        let mut atoms: Atoms<S> = vec![(ElementSet::empty(universe), S::one())];
        for &e in &elems {
            let p = self.x[e].clone();
            let q = S::one() - p.clone();
            let zero = S::zero();
            let mut next = Vec::with_capacity(atoms.len() * 2);
            for (set, w) in atoms {
                if q != zero {
                    next.push((set.clone(), w.clone() * q.clone()));
                }
                if p != zero {
                    next.push((set.with(e), w * p.clone()));
                }
            }
            atoms = next;
        }
        Ok(atoms)
    }
}

/// Counts of observed outcomes; probabilities are frequencies.
#[derive(Clone, Debug, Default)]
pub struct Histogram {
    universe: usize,
    total: u64,
    small: HashMap<u64, u64>,
    large: HashMap<ElementSet, u64>,
}

impl Histogram {
    pub fn new(universe: usize) -> Self {
        Self {
            universe,
            ..Self::default()
        }
    }

    pub fn add(&mut self, sample: &ElementSet) {
        self.add_count(sample, 1);
    }

    fn add_count(&mut self, sample: &ElementSet, count: u64) {
        self.total += count;
        if self.universe <= 64 {
            *self.small.entry(sample.low_mask()).or_default() += count;
        } else {
            *self.large.entry(sample.clone()).or_default() += count;
        }
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (set, count) in other.entries() {
            self.add_count(&set, count);
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Distinct outcomes with counts, sorted by membership vector.
    pub fn entries(&self) -> Vec<(ElementSet, u64)> {
        let mut out: Vec<(ElementSet, u64)> = if self.universe <= 64 {
            self.small
                .iter()
                .map(|(&mask, &c)| (ElementSet::from_mask(self.universe, mask), c))
                .collect()
        } else {
            self.large.iter().map(|(s, &c)| (s.clone(), c)).collect()
        };
        out.sort_by_key(|(set, _)| set.to_vec());
        out
    }
}

/// Frequencies over a fixed list of samples.
#[derive(Clone, Debug)]
pub struct EmpiricalMeasure {
    histogram: Histogram,
}

impl EmpiricalMeasure {
    pub fn from_samples(universe: usize, samples: &[ElementSet]) -> Result<Self> {
        let mut histogram = Histogram::new(universe);
        for s in samples {
            if let Some(e) = s.max_element().filter(|&e| e >= universe) {
                return Err(Error::OutOfRange {
                    element: e,
                    size: universe,
                });
            }
            histogram.add(s);
        }
        Self::from_histogram(histogram)
    }

    pub fn from_histogram(histogram: Histogram) -> Result<Self> {
        if histogram.total() == 0 {
            return invalid("empirical measure needs at least one sample");
        }
        Ok(Self { histogram })
    }

    pub fn sample_count(&self) -> u64 {
        self.histogram.total()
    }
}

fn restricted_counts(histogram: &Histogram, candidates: &ElementSet) -> Vec<(ElementSet, u64)> {
    let mut merged = Histogram::new(histogram.universe());
    for (set, c) in histogram.entries() {
        merged.add_count(&set.intersection(candidates), c);
    }
    merged.entries()
}

impl<S: Scalar> SpanMeasure<S> for EmpiricalMeasure {
    fn ground_size(&self) -> usize {
        self.histogram.universe()
    }

    fn atoms(&self, candidates: &ElementSet) -> Result<Atoms<S>> {
        let total = S::from_count(self.histogram.total() as usize);
        Ok(restricted_counts(&self.histogram, candidates)
            .into_iter()
            .map(|(set, c)| (set, S::from_count(c as usize) / total.clone()))
            .collect())
    }
}

/// Fresh draws of a product measure per query.
///
/// Each query's stream is keyed by the candidate set, so answers are
/// reproducible but different candidate sets see independent draws.
#[derive(Clone, Debug)]
pub struct MonteCarloMeasure {
    x: Vec<f64>,
    trials: usize,
    streams: Streams,
}

impl MonteCarloMeasure {
    pub fn new(x: Vec<f64>, trials: usize, streams: Streams) -> Result<Self> {
        if trials == 0 {
            return invalid("Monte Carlo measure needs at least one trial");
        }
        ExactMeasure::new(x.clone())?;
        Ok(Self { x, trials, streams })
    }
}

/// Independent inclusion of each element with its marginal.
pub fn sample_product<R: Rng + ?Sized>(x: &[f64], rng: &mut R) -> ElementSet {
    let mut set = ElementSet::empty(x.len());
    for (i, &p) in x.iter().enumerate() {
        if rng.random::<f64>() < p {
            set.insert(i);
        }
    }
    set
}

impl SpanMeasure<f64> for MonteCarloMeasure {
    fn ground_size(&self) -> usize {
        self.x.len()
    }

    fn atoms(&self, candidates: &ElementSet) -> Result<Atoms<f64>> {
        let key = candidates.iter().fold(0u64, |h, e| {
            h.rotate_left(7) ^ (e as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        });
        let mut rng = self.streams.indexed("query", key).rng(0);
        let mut histogram = Histogram::new(self.x.len());
        for _ in 0..self.trials {
            histogram.add(&sample_product(&self.x, &mut rng).intersection(candidates));
        }
        let total = self.trials as f64;
        Ok(histogram
            .entries()
            .into_iter()
            .map(|(set, c)| (set, c as f64 / total))
            .collect())
    }
}

/// Probability, for each candidate, of being spanned by the rest of
/// `atom ∪ protected`. Candidates already protected are skipped.
pub fn span_probabilities<M, S>(
    m: &M,
    atoms: &Atoms<S>,
    protected: &ElementSet,
    candidates: &ElementSet,
) -> Vec<(ElementId, S)>
where
    M: Matroid + ?Sized,
    S: Scalar,
{
    let open = candidates.difference(protected);
    let mut probs = vec![S::zero(); m.ground_size()];
    for (atom, w) in atoms {
        let mut x = atom.clone();
        x.union_with(protected);
        for e in &m.spanned_elements(&x, &open) {
            probs[e] = probs[e].clone() + w.clone();
        }
    }
    open.iter().map(|e| (e, probs[e].clone())).collect()
}

/// `Pr[e ∈ span(((R ∩ N) ∪ S) - e)]` for a single element.
pub fn span_probability<M, S, P>(
    m: &M,
    measure: &P,
    candidates: &ElementSet,
    protected: &ElementSet,
    e: ElementId,
) -> Result<S>
where
    M: Matroid + ?Sized,
    S: Scalar,
    P: SpanMeasure<S> + ?Sized,
{
    m.check_set(candidates)?;
    m.check_set(protected)?;
    m.check_element(e)?;
    if measure.ground_size() != m.ground_size() {
        return Err(Error::LengthMismatch {
            expected: m.ground_size(),
            got: measure.ground_size(),
        });
    }
    if !candidates.contains(e) || protected.contains(e) {
        return invalid(format!("element {e} must lie in N \\ S"));
    }
    let atoms = measure.atoms(candidates)?;
    let single = ElementSet::empty(m.ground_size()).with(e);
    Ok(span_probabilities(m, &atoms, protected, &single)
        .pop()
        .map(|(_, p)| p)
        .unwrap_or_else(S::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::UniformMatroid;
    use crate::Rational;

    #[test]
    fn rank_one_examples() {
        let m = UniformMatroid::new(2, 1).unwrap();
        let all = m.ground_set();
        let exact = ExactMeasure::new(vec![0.4, 0.4]).unwrap();
        let p: f64 = span_probability(&m, &exact, &all, &m.empty_set(), 0).unwrap();
        assert!((p - 0.4).abs() < 1e-12);
        let p: f64 = span_probability(&m, &exact, &all, &m.set_of(&[1]).unwrap(), 0).unwrap();
        assert_eq!(p, 1.0);
        let zero = ExactMeasure::new(vec![0.0, 0.0]).unwrap();
        let p: f64 = span_probability(&m, &zero, &all, &m.empty_set(), 1).unwrap();
        assert_eq!(p, 0.0);
        let err: Result<f64> = span_probability(&m, &exact, &all, &m.set_of(&[0]).unwrap(), 0);
        assert!(err.is_err());
    }

    #[test]
    fn exact_rational_weights_sum_to_one() {
        let third = Rational::new(1.into(), 3.into());
        let exact = ExactMeasure::new(vec![third; 4]).unwrap();
        let atoms = exact.atoms(&ElementSet::full(4)).unwrap();
        assert_eq!(atoms.len(), 16);
        let total = atoms.iter().fold(Rational::from_integer(0.into()), |a, (_, w)| a + w);
        assert_eq!(total, Rational::from_integer(1.into()));
    }

    #[test]
    fn empirical_frequencies() {
        let m = UniformMatroid::new(3, 1).unwrap();
        let samples = vec![
            m.set_of(&[0, 1]).unwrap(),
            m.set_of(&[1]).unwrap(),
            m.set_of(&[]).unwrap(),
            m.set_of(&[2]).unwrap(),
        ];
        let emp = EmpiricalMeasure::from_samples(3, &samples).unwrap();
        let n = m.set_of(&[0, 1]).unwrap();
        // 0 is spanned when 1 is present: samples 0 and 1
        let p: f64 = span_probability(&m, &emp, &n, &m.empty_set(), 0).unwrap();
        assert_eq!(p, 0.5);
        assert!(EmpiricalMeasure::from_samples(3, &[]).is_err());
        assert!(EmpiricalMeasure::from_samples(2, &samples).is_err());
    }

    #[test]
    fn monte_carlo_is_close_and_reproducible() {
        let m = UniformMatroid::new(2, 1).unwrap();
        let mc = MonteCarloMeasure::new(vec![0.4, 0.4], 100_000, Streams::new(4)).unwrap();
        let p: f64 = span_probability(&m, &mc, &m.ground_set(), &m.empty_set(), 0).unwrap();
        let q: f64 = span_probability(&m, &mc, &m.ground_set(), &m.empty_set(), 0).unwrap();
        assert_eq!(p, q);
        assert!((p - 0.4).abs() < 0.01);
    }

    #[test]
    fn exact_limit() {
        let exact = ExactMeasure::new(vec![0.1; 21]).unwrap();
        let r: Result<Atoms<f64>> = exact.atoms(&ElementSet::full(21));
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }
}
