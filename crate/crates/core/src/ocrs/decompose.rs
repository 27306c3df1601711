//! Chain decompositions `N_0 ⊋ N_1 ⊋ ... ⊋ N_l = ∅`, where each layer is
//! the protected set of the previous one.
//!
//! Loops can never be accepted and are always spanned, so they would keep
//! every layer from shrinking. They are set aside before layer 0.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::{Matroid, MatroidExt};
use crate::rng::Streams;
use crate::scalar::Scalar;
use crate::set::{ElementId, ElementSet};

use super::measure::{EmpiricalMeasure, SpanMeasure};
use super::params::OcrsParams;
use super::select::select;
use super::source::SampleSource;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DecompositionStatus {
    Ok,
    Failed { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainDecomposition {
    /// `N_0, ..., N_l`; the last entry is empty on success.
    pub layers: Vec<ElementSet>,
    /// Threshold used to select `N_{i+1}` from `N_i`.
    pub thresholds: Vec<f64>,
    pub loops: ElementSet,
    pub status: DecompositionStatus,
}

impl ChainDecomposition {
    pub fn is_ok(&self) -> bool {
        self.status == DecompositionStatus::Ok
    }

    /// Number of steps `l`.
    pub fn depth(&self) -> usize {
        self.layers.len().saturating_sub(1)
    }

    /// The `i` with `e ∈ N_i \ N_{i+1}`.
    pub fn layer_of(&self, e: ElementId) -> Option<usize> {
        (0..self.depth()).find(|&i| self.layers[i].contains(e) && !self.layers[i + 1].contains(e))
    }

    pub fn ranks<M: Matroid + ?Sized>(&self, m: &M) -> Vec<usize> {
        self.layers.iter().map(|l| m.basis_of(l).len()).collect()
    }

    /// Whether `rank(N_{i+1}) < (b / c) rank(N_i)` on every nonempty step.
    pub fn rank_decay_holds<M: Matroid + ?Sized>(&self, m: &M, b: f64, c: f64) -> bool {
        let ranks = self.ranks(m);
        ranks
            .windows(2)
            .all(|w| w[0] == 0 || (w[1] as f64) < b / c * w[0] as f64)
    }

    /// Strictly nested layers ending with the empty set.
    /// The untrained chain `N_0 ⊃ ∅`, under which the layered greedy is
    /// plain greedy on the loopless part.
    pub fn single_layer<M: Matroid + ?Sized>(m: &M) -> Self {
        let (start, loops) = initial_layer(m);
        let empty = m.empty_set();
        let layers = if start.is_empty() { vec![start] } else { vec![start, empty] };
        Self {
            layers,
            thresholds: Vec::new(),
            loops,
            status: DecompositionStatus::Ok,
        }
    }

    pub fn is_strict_chain(&self) -> bool {
        self.layers.windows(2).all(|w| w[1].is_subset(&w[0]) && w[1] != w[0])
            && self.layers.last().is_some_and(ElementSet::is_empty)
    }
}

fn initial_layer<M: Matroid + ?Sized>(m: &M) -> (ElementSet, ElementSet) {
    let loops = m.loops();
    (m.ground_set().difference(&loops), loops)
}

fn failed(layers: Vec<ElementSet>, thresholds: Vec<f64>, loops: ElementSet, reason: String) -> ChainDecomposition {
    ChainDecomposition {
        layers,
        thresholds,
        loops,
        status: DecompositionStatus::Failed { reason },
    }
}

/// Iterates selection at a fixed threshold against a known measure.
pub fn decompose_exact<M, S, P>(m: &M, measure: &P, c: &S, max_layers: usize) -> Result<ChainDecomposition>
where
    M: Matroid + ?Sized,
    S: Scalar,
    P: SpanMeasure<S> + ?Sized,
{
    let (start, loops) = initial_layer(m);
    let mut layers = vec![start];
    let mut thresholds = Vec::new();
    loop {
        let current = layers.last().expect("nonempty");
        if current.is_empty() {
            break;
        }
        if layers.len() > max_layers {
            return Ok(failed(layers, thresholds, loops, format!("more than {max_layers} layers")));
        }
        let next = select(m, measure, current, c)?;
        thresholds.push(c.lossy_f64());
        if &next == current {
            layers.push(next);
            return Ok(failed(layers, thresholds, loops, "layer did not shrink".into()));
        }
        layers.push(next);
    }
    Ok(ChainDecomposition {
        layers,
        thresholds,
        loops,
        status: DecompositionStatus::Ok,
    })
}

/// Sample-trained decomposition: each layer draws a random midpoint of the
/// threshold grid and `s` fresh samples from `source`.
pub fn decompose_sampled<M, Src>(
    m: &M,
    source: &mut Src,
    params: &OcrsParams,
    streams: &Streams,
) -> Result<ChainDecomposition>
where
    M: Matroid + ?Sized,
    Src: SampleSource + ?Sized,
{
    params.validate()?;
    if source.universe() != m.ground_size() {
        return Err(Error::LengthMismatch {
            expected: m.ground_size(),
            got: source.universe(),
        });
    }
    let mut rng = streams.rng(0);
    let (start, loops) = initial_layer(m);
    let mut layers = vec![start];
    let mut thresholds = Vec::new();
    loop {
        let current = layers.last().expect("nonempty");
        if current.is_empty() {
            break;
        }
        if layers.len() > params.max_layers {
            let reason = format!("more than {} layers", params.max_layers);
            return Ok(failed(layers, thresholds, loops, reason));
        }
        let j = rng.random_range(0..params.k);
        let c = params.midpoint(j);
        let measure = EmpiricalMeasure::from_histogram(source.draw(params.s)?)?;
        let next = select(m, &measure, current, &c)?;
        thresholds.push(c);
        if &next == current {
            layers.push(next);
            return Ok(failed(layers, thresholds, loops, "layer did not shrink".into()));
        }
        layers.push(next);
    }
    Ok(ChainDecomposition {
        layers,
        thresholds,
        loops,
        status: DecompositionStatus::Ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::UniformMatroid;
    use crate::ocrs::measure::ExactMeasure;
    use crate::ocrs::source::SampleList;

    #[test]
    fn exact_examples() {
        let m = UniformMatroid::new(2, 1).unwrap();
        let zero = ExactMeasure::new(vec![0.0, 0.0]).unwrap();
        let d = decompose_exact(&m, &zero, &0.75, 10).unwrap();
        assert!(d.is_ok() && d.depth() == 1 && d.layers[1].is_empty());
        let small = ExactMeasure::new(vec![0.2, 0.2]).unwrap();
        let d = decompose_exact(&m, &small, &0.75, 10).unwrap();
        assert_eq!(d.depth(), 1);
        assert!(d.rank_decay_holds(&m, 0.5, 0.75));
        assert_eq!(d.layer_of(1), Some(0));
    }

    #[test]
    fn single_layer_is_plain_greedy() {
        let m = UniformMatroid::new(3, 2).unwrap();
        let d = ChainDecomposition::single_layer(&m);
        assert!(d.is_ok() && d.is_strict_chain() && d.depth() == 1);
        assert_eq!(d.layer_of(2), Some(0));
        let none = ChainDecomposition::single_layer(&UniformMatroid::new(2, 0).unwrap());
        assert_eq!(none.depth(), 0);
    }

    #[test]
    fn non_shrinking_layer_fails() {
        let m = UniformMatroid::new(3, 1).unwrap();
        let heavy = ExactMeasure::new(vec![1.0; 3]).unwrap();
        let d = decompose_exact(&m, &heavy, &0.6, 10).unwrap();
        assert!(!d.is_ok());
    }

    #[test]
    fn loops_are_set_aside() {
        let m = UniformMatroid::new(2, 0).unwrap();
        let x = ExactMeasure::new(vec![0.5, 0.5]).unwrap();
        let d = decompose_exact(&m, &x, &0.6, 10).unwrap();
        assert!(d.is_ok());
        assert_eq!(d.loops.len(), 2);
        assert_eq!(d.depth(), 0);
    }

    #[test]
    fn sampled_with_empty_samples() {
        let m = UniformMatroid::new(4, 2).unwrap();
        let params = OcrsParams::default_for(4, 0.2).unwrap().with_s(3);
        let mut src = SampleList::new(4, vec![m.empty_set(); 3]);
        let d = decompose_sampled(&m, &mut src, &params, &Streams::new(1)).unwrap();
        assert!(d.is_ok() && d.depth() == 1 && d.is_strict_chain());
        assert!(decompose_sampled(&m, &mut src, &params, &Streams::new(1)).is_err());
        let back: ChainDecomposition = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }
}
