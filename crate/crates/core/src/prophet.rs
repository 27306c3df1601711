//! Two-stage prophet policy.
//!
//! Stage one learns quantile thresholds from its own samples. Stage two
//! trains the contention resolution decomposition on fresh samples pushed
//! through the activation rule and the `b`-shrink, exactly as live arrivals
//! will be. Online, each arrival flips its activation and shrink coins and
//! is then offered to the layered greedy.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::matroid::{Matroid, MatroidExt};
use crate::ocrs::{decompose_sampled, shrink, ChainDecomposition, LayeredGreedy, OcrsParams, StreamSource};
use crate::rng::{StreamRng, Streams};
use crate::set::{ElementId, ElementSet};
use crate::thresholds::{default_threshold_samples, learn_thresholds, ThresholdTable, CHUNK, DEFAULT_SAMPLE_CONSTANT};
use crate::values::{sample_values, Instance, TieBrokenValue};

/// Resolved training parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub epsilon: f64,
    /// Value vectors drawn for threshold learning.
    pub threshold_samples: usize,
    pub ocrs: OcrsParams,
}

impl TrainConfig {
    /// Default sample sizes for `n` elements.
    pub fn defaults(n: usize, epsilon: f64) -> Result<Self> {
        let ocrs = OcrsParams::default_for(n, epsilon)?;
        Ok(Self {
            epsilon,
            threshold_samples: default_threshold_samples(n, epsilon, DEFAULT_SAMPLE_CONSTANT),
            ocrs,
        })
    }

    pub fn with_threshold_samples(mut self, samples: usize) -> Self {
        self.threshold_samples = samples;
        self
    }

    pub fn with_s(mut self, s: usize) -> Self {
        self.ocrs.s = s;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleBudget {
    pub threshold_vectors: usize,
    pub ocrs_vectors: usize,
}

impl SampleBudget {
    pub fn total(&self) -> usize {
        self.threshold_vectors + self.ocrs_vectors
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProphetPolicy {
    pub table: ThresholdTable,
    pub decomposition: ChainDecomposition,
    pub params: OcrsParams,
    pub samples: SampleBudget,
    /// Key of the seed node the policy was trained from.
    pub lineage: u64,
}

impl ProphetPolicy {
    pub fn is_ok(&self) -> bool {
        self.decomposition.is_ok()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

/// One stage-two training sample: fresh values, activation, shrink.
pub fn activation_sample<R: Rng + ?Sized>(
    table: &ThresholdTable,
    dists: &[crate::values::ValueDistribution],
    b: f64,
    rng: &mut R,
) -> ElementSet {
    let v = sample_values(dists, rng);
    let active = table.activate(&v, rng);
    shrink(&active, b, rng)
}

/// Trains thresholds and decomposition on disjoint streams under `streams`.
pub fn train<M: Matroid>(inst: &Instance<M>, cfg: &TrainConfig, streams: &Streams) -> Result<ProphetPolicy> {
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 0.25) {
        return invalid(format!("epsilon {} outside (0, 1/4)", cfg.epsilon));
    }
    cfg.ocrs.validate()?;
    let m = &inst.matroid;
    let table = learn_thresholds(m, &inst.dists, cfg.threshold_samples, cfg.epsilon, &streams.child("thresholds"))?;
    let b = cfg.ocrs.b;
    let mut source = StreamSource::new(m.ground_size(), streams.child("ocrs-samples"), |rng: &mut StreamRng| {
        activation_sample(&table, &inst.dists, b, rng)
    });
    let decomposition = decompose_sampled(m, &mut source, &cfg.ocrs, &streams.child("ocrs-layers"))?;
    let ocrs_vectors = crate::ocrs::SampleSource::drawn(&source);
    Ok(ProphetPolicy {
        table,
        decomposition,
        params: cfg.ocrs.clone(),
        samples: SampleBudget {
            threshold_vectors: cfg.threshold_samples,
            ocrs_vectors,
        },
        lineage: streams.key(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OnlineOutcome {
    pub accepted: ElementSet,
    /// Sum of accepted base values.
    pub value: f64,
    pub active: ElementSet,
}

/// One online pass. Both coins are drawn for every arrival, in arrival
/// order, so runs with different values stay coupled.
pub fn run_online<M, R>(
    policy: &ProphetPolicy,
    m: &M,
    v: &[TieBrokenValue],
    order: &[ElementId],
    rng: &mut R,
) -> Result<OnlineOutcome>
where
    M: Matroid + ?Sized,
    R: Rng + ?Sized,
{
    let n = m.ground_size();
    if v.len() != n || order.len() != n {
        return invalid("values and order must cover the ground set");
    }
    let mut accepted_value = 0.0;
    let mut active = m.empty_set();
    if !policy.is_ok() {
        return Ok(OnlineOutcome {
            accepted: m.empty_set(),
            value: 0.0,
            active,
        });
    }
    let mut greedy = LayeredGreedy::new(m, &policy.decomposition)?;
    for &e in order {
        let activation: f64 = rng.random();
        let keep: f64 = rng.random();
        if activation < policy.table.activation_probability(e, &v[e]) && keep < policy.params.b {
            active.insert(e);
            if greedy.offer(e)? {
                accepted_value += v[e].base;
            }
        }
    }
    Ok(OnlineOutcome {
        accepted: greedy.accepted(),
        value: accepted_value,
        active,
    })
}

/// Sum of base values over the max-weight basis.
pub fn opt_value<M: Matroid + ?Sized>(m: &M, v: &[TieBrokenValue]) -> Result<f64> {
    Ok(m.max_weight_basis(v)?.iter().map(|e| v[e].base).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl MeanEstimate {
    /// Mean and standard error of `xs`, summed in order.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                stderr: f64::NAN,
                trials: 0,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            stderr: (var / n as f64).sqrt(),
            trials: n,
        }
    }
}

/// Monte Carlo estimate of `E[OPT]`.
pub fn expected_opt<M: Matroid>(inst: &Instance<M>, trials: usize, streams: &Streams) -> Result<MeanEstimate> {
    if trials == 0 {
        return invalid("expected_opt needs at least one trial");
    }
    let chunks = trials.div_ceil(CHUNK);
    let values: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = streams.rng(c as u64);
            (0..CHUNK.min(trials - c * CHUNK))
                .map(|_| {
                    let v = inst.sample_vector(&mut rng);
                    opt_value(&inst.matroid, &v).expect("lengths match")
                })
                .collect()
        })
        .collect();
    Ok(MeanEstimate::from_samples(&values.concat()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::UniformMatroid;
    use crate::values::{TieBroken, ValueDistribution};

    fn rank_one(n: usize) -> Instance<UniformMatroid> {
        Instance::new(
            UniformMatroid::new(n, 1).unwrap(),
            vec![ValueDistribution::Uniform { a: 0.0, b: 1.0 }; n],
        )
        .unwrap()
    }

    #[test]
    fn expected_opt_examples() {
        let constant = Instance::new(
            UniformMatroid::new(2, 1).unwrap(),
            vec![ValueDistribution::Constant { value: 2.0 }, ValueDistribution::Constant { value: 1.0 }],
        )
        .unwrap();
        let est = expected_opt(&constant, 100, &Streams::new(0)).unwrap();
        assert_eq!(est.mean, 2.0);
        assert_eq!(est.stderr, 0.0);

        let coin = ValueDistribution::Discrete {
            points: vec![0.0, 1.0],
            masses: vec![0.5, 0.5],
        };
        let single = Instance::new(UniformMatroid::new(2, 1).unwrap(), vec![coin.clone(); 2]).unwrap();
        let est = expected_opt(&single, 200_000, &Streams::new(1)).unwrap();
        assert!((est.mean - 0.75).abs() < 4.0 * est.stderr + 1e-3);
        let both = Instance::new(UniformMatroid::free(2), vec![coin; 2]).unwrap();
        let est = expected_opt(&both, 200_000, &Streams::new(1)).unwrap();
        assert!((est.mean - 1.0).abs() < 4.0 * est.stderr + 1e-3);
    }

    #[test]
    fn single_element_pipeline() {
        let inst = rank_one(1);
        let cfg = TrainConfig::defaults(1, 0.2).unwrap().with_threshold_samples(2000).with_s(200);
        let policy = train(&inst, &cfg, &Streams::new(7)).unwrap();
        assert!(policy.is_ok());
        // a lone element always extends the empty basis, so every tau is the floor
        assert!(policy.table.thresholds[0].iter().all(|t| *t == TieBroken::FLOOR));
        let v = vec![TieBroken::new(0.5, 0.5)];
        let mut accepted = 0;
        let mut rng = Streams::new(8).rng(0);
        for _ in 0..20_000 {
            let out = run_online(&policy, &inst.matroid, &v, &[0], &mut rng).unwrap();
            accepted += out.accepted.len();
        }
        let top = *policy.table.p.last().unwrap() * 0.5;
        assert!((accepted as f64 / 20_000.0 - top).abs() < 0.02);
    }

    #[test]
    fn policy_is_reproducible_and_serializable() {
        let inst = rank_one(4);
        let cfg = TrainConfig::defaults(4, 0.2).unwrap().with_threshold_samples(3000).with_s(500);
        let a = train(&inst, &cfg, &Streams::new(3)).unwrap();
        let b = train(&inst, &cfg, &Streams::new(3)).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(ProphetPolicy::from_json(&a.to_json().unwrap()).unwrap(), a);
        assert_eq!(a.samples.threshold_vectors, 3000);
        assert_eq!(a.samples.ocrs_vectors, a.decomposition.depth() * 500);
    }

    #[test]
    fn failed_policy_accepts_nothing() {
        let inst = rank_one(2);
        let cfg = TrainConfig::defaults(2, 0.2).unwrap().with_threshold_samples(100).with_s(10);
        let mut policy = train(&inst, &cfg, &Streams::new(3)).unwrap();
        policy.decomposition.status = crate::ocrs::DecompositionStatus::Failed { reason: "test".into() };
        let v = vec![TieBroken::new(5.0, 0.1), TieBroken::new(6.0, 0.1)];
        let out = run_online(&policy, &inst.matroid, &v, &[0, 1], &mut Streams::new(0).rng(0)).unwrap();
        assert!(out.accepted.is_empty() && out.value == 0.0);
    }
}
