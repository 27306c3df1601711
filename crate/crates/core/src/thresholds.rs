//! Exchange values, quantile thresholds learned from samples, and the
//! activation rule.
//!
//! `tau_i(v)` is the smallest value in `OPT_{-i}` that `i` can swap with, or
//! [`TieBroken::FLOOR`] when `i` extends `OPT_{-i}` directly. With
//! tie-broken values `i ∈ OPT(v)` exactly when `v_i > tau_i`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matroid::{descending_order, Matroid, MatroidExt};
use crate::rng::Streams;
use crate::set::{ElementId, ElementSet};
use crate::values::{sample_values, TieBroken, TieBrokenValue, ValueDistribution};

/// Samples per random stream when work is chunked; part of the
/// reproducibility contract, so changing it changes every learned table.
pub const CHUNK: usize = 4096;

/// Default multiplier in `N = C * ln(2nm/eps) / eps^4`.
pub const DEFAULT_SAMPLE_CONSTANT: f64 = 48.0;

fn check_values<M: Matroid + ?Sized>(m: &M, v: &[TieBrokenValue]) -> Result<()> {
    if v.len() != m.ground_size() {
        return Err(Error::LengthMismatch {
            expected: m.ground_size(),
            got: v.len(),
        });
    }
    Ok(())
}

fn min_exchangeable<M: Matroid + ?Sized>(
    m: &M,
    basis: &ElementSet,
    i: ElementId,
    v: &[TieBrokenValue],
) -> TieBrokenValue {
    basis
        .iter()
        .filter(|&j| m.independent(&basis.without(j).with(i)))
        .map(|j| v[j])
        .min()
        .unwrap_or(TieBroken::TOP)
}

/// `tau_i` computed straight from the definition: a fresh greedy run on
/// `U \ {i}` followed by an exchange scan.
pub fn compute_tau<M: Matroid + ?Sized>(m: &M, v: &[TieBrokenValue], i: ElementId) -> Result<TieBrokenValue> {
    check_values(m, v)?;
    m.check_element(i)?;
    if m.is_loop(i) {
        return invalid(format!("element {i} is a loop; its exchange value is undefined"));
    }
    let opt_minus = m.greedy(descending_order(v).into_iter().filter(|&e| e != i));
    if m.independent(&opt_minus.with(i)) {
        return Ok(TieBroken::FLOOR);
    }
    Ok(min_exchangeable(m, &opt_minus, i, v))
}

/// `tau_i` for every element from a single greedy run.
///
/// For `i ∉ OPT`, `OPT_{-i} = OPT`. For `i ∈ OPT`, `OPT_{-i}` is `OPT - i`
/// plus the heaviest outside element that restores a basis, if any. Loops
/// get [`TieBroken::TOP`], so they are never above their threshold.
pub fn tau_vector<M: Matroid + ?Sized>(m: &M, v: &[TieBrokenValue]) -> Result<Vec<TieBrokenValue>> {
    check_values(m, v)?;
    let order = descending_order(v);
    let opt = m.greedy(order.iter().copied());
    let mut tau = Vec::with_capacity(v.len());
    for i in 0..v.len() {
        let t = if !opt.contains(i) {
            // empty exactly when i is a loop, which then gets TOP
            min_exchangeable(m, &opt, i, v)
        } else {
            let reduced = opt.without(i);
            let replacement = order
                .iter()
                .copied()
                .find(|&j| !opt.contains(j) && m.independent(&reduced.with(j)));
            match replacement {
                None => TieBroken::FLOOR,
                Some(j) => min_exchangeable(m, &reduced.with(j), i, v),
            }
        };
        tau.push(t);
    }
    Ok(tau)
}

/// `m = floor(log_{1+eps}(1/eps))`.
pub fn bucket_count(epsilon: f64) -> usize {
    let raw = (1.0 / epsilon).ln() / (1.0 + epsilon).ln();
    (raw + 1e-9).floor().max(0.0) as usize
}

/// `p_k = eps(1+eps)^k - eps^2`.
pub fn activation_grid(epsilon: f64) -> Vec<f64> {
    (0..bucket_count(epsilon))
        .map(|k| epsilon * (1.0 + epsilon).powi(k as i32) - epsilon * epsilon)
        .collect()
}

/// 1-based rank `ceil(eps(1+eps)^k N)`, clamped to `[1, N]`.
pub fn quantile_rank(epsilon: f64, k: usize, samples: usize) -> usize {
    let raw = epsilon * (1.0 + epsilon).powi(k as i32) * samples as f64;
    ((raw - 1e-9).ceil().max(1.0) as usize).min(samples)
}

/// `ceil(C * ln(2nm/eps) / eps^4)` with `m` clamped to at least one.
pub fn default_threshold_samples(n: usize, epsilon: f64, constant: f64) -> usize {
    let m = bucket_count(epsilon).max(1);
    let arg = (2 * n.max(1) * m) as f64 / epsilon;
    (constant * arg.ln().max(1.0) / epsilon.powi(4)).ceil() as usize
}

/// Per-element thresholds `T[i][0..m]` with an implicit `+inf` column `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub epsilon: f64,
    pub buckets: usize,
    pub thresholds: Vec<Vec<TieBrokenValue>>,
    pub p: Vec<f64>,
    pub samples: usize,
    /// Set when `m = 0`: nothing can ever activate.
    pub degenerate: bool,
}

impl ThresholdTable {
    /// A table from explicit thresholds; rows must be nondecreasing.
    pub fn from_thresholds(epsilon: f64, thresholds: Vec<Vec<TieBrokenValue>>) -> Result<Self> {
        let buckets = bucket_count(epsilon);
        for (i, row) in thresholds.iter().enumerate() {
            if row.len() != buckets {
                return Err(Error::LengthMismatch {
                    expected: buckets,
                    got: row.len(),
                });
            }
            if row.windows(2).any(|w| w[0] > w[1]) {
                return invalid(format!("thresholds of element {i} are not sorted"));
            }
        }
        Ok(Self {
            epsilon,
            buckets,
            thresholds,
            p: activation_grid(epsilon),
            samples: 0,
            degenerate: buckets == 0,
        })
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// `T[i][k]` for `k <= m`, with `T[i][m] = +inf`.
    pub fn threshold(&self, i: ElementId, k: usize) -> TieBrokenValue {
        if k >= self.buckets {
            TieBroken::TOP
        } else {
            self.thresholds[i][k]
        }
    }

    /// `p_k` for the bucket `[T[i][k], T[i][k+1])` holding `v`, zero below `T[i][0]`.
    pub fn activation_probability(&self, i: ElementId, v: &TieBrokenValue) -> f64 {
        let k = self.thresholds[i].partition_point(|t| t <= v);
        if k == 0 {
            0.0
        } else {
            self.p[k - 1]
        }
    }

    /// One coin per element, drawn for every element in id order.
    pub fn activate<R: Rng + ?Sized>(&self, v: &[TieBrokenValue], rng: &mut R) -> ElementSet {
        let mut active = ElementSet::empty(v.len());
        for (i, value) in v.iter().enumerate() {
            let u: f64 = rng.random();
            if u < self.activation_probability(i, value) {
                active.insert(i);
            }
        }
        active
    }
}

/// Draws `samples` value vectors, computes every `tau_i`, and keeps the
/// `ceil(eps(1+eps)^k N)`-th smallest per element and bucket.
///
/// Samples are consumed in chunks of [`CHUNK`] per stream of `streams` and
/// discarded once the order statistics are taken.
pub fn learn_thresholds<M: Matroid + ?Sized>(
    m: &M,
    dists: &[ValueDistribution],
    samples: usize,
    epsilon: f64,
    streams: &Streams,
) -> Result<ThresholdTable> {
    let n = m.ground_size();
    if dists.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: dists.len(),
        });
    }
    if samples == 0 {
        return invalid("threshold learning needs at least one sample");
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return invalid(format!("epsilon {epsilon} outside (0, 1)"));
    }
    for d in dists {
        d.validate()?;
    }
    let chunks = samples.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<TieBrokenValue>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = streams.rng(c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut out = Vec::with_capacity(count * n);
            for _ in 0..count {
                let v = sample_values(dists, &mut rng);
                out.extend(tau_vector(m, &v).expect("lengths checked"));
            }
            out
        })
        .collect();

    let buckets = bucket_count(epsilon);
    let ranks: Vec<usize> = (0..buckets).map(|k| quantile_rank(epsilon, k, samples)).collect();
    let thresholds: Vec<Vec<TieBrokenValue>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut column: Vec<TieBrokenValue> = per_chunk
                .iter()
                .flat_map(|chunk| chunk.iter().skip(i).step_by(n).copied())
                .collect();
            // ranks are nondecreasing, so each selection only looks right of the last
            let mut lo = 0;
            ranks
                .iter()
                .map(|&r| {
                    let (_, nth, _) = column[lo..].select_nth_unstable(r - 1 - lo);
                    lo = r - 1;
                    *nth
                })
                .collect()
        })
        .collect();
    Ok(ThresholdTable {
        epsilon,
        buckets,
        thresholds,
        p: activation_grid(epsilon),
        samples,
        degenerate: buckets == 0,
    })
}

/// Monte Carlo check of how far each learned threshold sits from its target
/// quantile of `tau_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDiagnostic {
    /// `estimates[i][k]` estimates `Pr[tau_i < T[i][k]]`.
    pub estimates: Vec<Vec<f64>>,
    /// Accepted interval per bucket, slack included.
    pub bands: Vec<(f64, f64)>,
    pub trials: usize,
    pub all_in_band: bool,
}

/// Band for bucket `k`: `eps(1+eps)^k ± eps^2`, widened by `slack`.
pub fn good_threshold_band(epsilon: f64, k: usize, slack: f64) -> (f64, f64) {
    let center = epsilon * (1.0 + epsilon).powi(k as i32);
    let e2 = epsilon * epsilon;
    (center - e2 - slack, center + e2 + slack)
}

pub fn good_threshold_diagnostic<M: Matroid + ?Sized>(
    m: &M,
    dists: &[ValueDistribution],
    table: &ThresholdTable,
    trials: usize,
    slack: f64,
    streams: &Streams,
) -> Result<ThresholdDiagnostic> {
    let n = m.ground_size();
    if table.len() != n || dists.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: table.len().min(dists.len()),
        });
    }
    if trials == 0 {
        return invalid("diagnostic needs at least one trial");
    }
    let buckets = table.buckets;
    let chunks = trials.div_ceil(CHUNK);
    let counts: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = streams.rng(c as u64);
            let mut counts = vec![0u64; n * buckets];
            for _ in 0..CHUNK.min(trials - c * CHUNK) {
                let v = sample_values(dists, &mut rng);
                let tau = tau_vector(m, &v).expect("lengths checked");
                for i in 0..n {
                    let below = table.thresholds[i].partition_point(|t| *t <= tau[i]);
                    for slot in &mut counts[i * buckets + below..(i + 1) * buckets] {
                        *slot += 1;
                    }
                }
            }
            counts
        })
        .collect();
    let mut totals = vec![0u64; n * buckets];
    for chunk in &counts {
        for (t, c) in totals.iter_mut().zip(chunk) {
            *t += c;
        }
    }
    let estimates: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..buckets)
                .map(|k| totals[i * buckets + k] as f64 / trials as f64)
                .collect()
        })
        .collect();
    let bands: Vec<(f64, f64)> = (0..buckets)
        .map(|k| good_threshold_band(table.epsilon, k, slack))
        .collect();
    let all_in_band = estimates
        .iter()
        .all(|row| row.iter().zip(&bands).all(|(e, (lo, hi))| lo <= e && e <= hi));
    Ok(ThresholdDiagnostic {
        estimates,
        bands,
        trials,
        all_in_band,
    })
}
