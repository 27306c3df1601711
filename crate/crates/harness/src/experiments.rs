//! Experiment runners, one per [`ExperimentKind`].

use rand::Rng;
use rayon::prelude::*;
use sampled_prophet_core::matroid::{polytope_slack, MAX_POLYTOPE_ELEMENTS};
use sampled_prophet_core::ocrs::{decompose_sampled, sample_product, shrunk_product_source, LayeredGreedy, SampleSource, StreamSource};
use sampled_prophet_core::prophet::{activation_sample, run_online, train, MeanEstimate};
use sampled_prophet_core::thresholds::{good_threshold_band, good_threshold_diagnostic, learn_thresholds, CHUNK};
use sampled_prophet_core::{
    ChainDecomposition, ElementId, Instance, Matroid, MatroidExt, OcrsParams, StreamRng, Streams, ThresholdTable,
    TrainConfig,
};

use crate::config::{ExperimentConfig, ExperimentKind, OrderMode};
use crate::error::{HarnessError, Result};
use crate::hard::gen_hard_instance;
use crate::order::{resolve, Arrival};
use crate::report::{
    ChainSummary, DecompositionSummary, ElementRow, LowerBoundRow, PolicyRow, RatioSummary, Report,
    SelectabilitySummary, ThresholdSummary,
};
use crate::stats::{ratio_of_means, Z95};

/// Active-set draws used to rank elements for the adversarial order.
pub const EXPOSURE_SAMPLES: usize = 20_000;

const DEFAULT_POLICIES: usize = 20;
const DEFAULT_REPETITIONS: usize = 20;
const DEFAULT_DIAGNOSTIC_TRIALS: usize = 10_000;
const DEFAULT_SLACK: f64 = 0.02;

/// Runs `cfg`. Configuration problems are returned as errors; anything
/// that goes wrong during the run becomes an error report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let kind = cfg.kind()?;
    let report = Report::new(kind, cfg);
    let outcome = match kind {
        ExperimentKind::Selectability => selectability(cfg, report.clone()),
        ExperimentKind::ProphetRatio => prophet_ratio(cfg, report.clone()),
        ExperimentKind::ThresholdsDiagnostic => thresholds_diagnostic(cfg, report.clone()),
        ExperimentKind::LowerBound => lower_bound(cfg, report.clone()),
        ExperimentKind::DecompositionStats => decomposition_stats(cfg, report.clone()),
    };
    match outcome {
        Ok(r) => Ok(r),
        Err(HarnessError::Config(msg)) => Err(HarnessError::Config(msg)),
        Err(e) => Ok(report.fail(e.to_string())),
    }
}

/// Runs `cfg` on a dedicated pool of `threads` workers.
pub fn run_with_threads(cfg: &ExperimentConfig, threads: usize) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(cfg))
}

fn order_name(mode: &OrderMode) -> String {
    match mode {
        OrderMode::Identity => "identity".into(),
        OrderMode::Reverse => "reverse".into(),
        OrderMode::RandomPerTrial => "random-per-trial".into(),
        OrderMode::AdversarialHeuristic => "adversarial-heuristic".into(),
        OrderMode::Fixed(_) => "fixed".into(),
    }
}

pub fn chain_summary<M: Matroid + ?Sized>(m: &M, d: &ChainDecomposition) -> ChainSummary {
    ChainSummary {
        ok: d.is_ok(),
        depth: d.depth(),
        ranks: d.ranks(m),
        layer_sizes: d.layers.iter().map(|l| l.len()).collect(),
        thresholds: d.thresholds.clone(),
        failure: match &d.status {
            sampled_prophet_core::ocrs::DecompositionStatus::Ok => None,
            sampled_prophet_core::ocrs::DecompositionStatus::Failed { reason } => Some(reason.clone()),
        },
    }
}

/// Trains a chain from draws of `R(b x)`; `s = 0` gives the untrained
/// single layer. Returns the chain and the number of vectors drawn.
pub fn train_chain<M: Matroid + ?Sized>(
    m: &M,
    x: &[f64],
    params: &OcrsParams,
    streams: &Streams,
) -> Result<(ChainDecomposition, usize)> {
    if params.s == 0 {
        return Ok((ChainDecomposition::single_layer(m), 0));
    }
    let mut source = shrunk_product_source(x.to_vec(), params.b, streams.child("ocrs-samples"));
    let d = decompose_sampled(m, &mut source, params, &streams.child("ocrs-layers"))?;
    Ok((d, source.drawn()))
}

/// Per-element counts of `(active, accepted)` and independence violations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SelectionCounts {
    pub active: Vec<u64>,
    pub accepted: Vec<u64>,
    pub violations: u64,
}

impl SelectionCounts {
    fn new(n: usize) -> Self {
        Self {
            active: vec![0; n],
            accepted: vec![0; n],
            violations: 0,
        }
    }

    fn merge(&mut self, other: &Self) {
        for (a, b) in self.active.iter_mut().zip(&other.active) {
            *a += b;
        }
        for (a, b) in self.accepted.iter_mut().zip(&other.accepted) {
            *a += b;
        }
        self.violations += other.violations;
    }
}

/// Draws `R(x)`, thins each active element by a `b`-coin, and offers the
/// survivors in arrival order. A failed chain accepts nothing.
pub fn evaluate_selectability<M: Matroid + ?Sized>(
    m: &M,
    x: &[f64],
    b: f64,
    d: &ChainDecomposition,
    arrival: &Arrival,
    trials: usize,
    streams: &Streams,
) -> Result<SelectionCounts> {
    let n = m.ground_size();
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<SelectionCounts> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<SelectionCounts> {
            let mut rng = streams.rng(c as u64);
            let mut counts = SelectionCounts::new(n);
            let mut greedy = if d.is_ok() { Some(LayeredGreedy::new(m, d)?) } else { None };
            for _ in 0..CHUNK.min(trials - c * CHUNK) {
                let active = sample_product(x, &mut rng);
                let order = arrival.for_trial(&mut rng);
                for e in &active {
                    counts.active[e] += 1;
                }
                let Some(g) = greedy.as_mut() else { continue };
                g.reset();
                for e in order {
                    if active.contains(e) && rng.random::<f64>() < b && g.offer(e)? {
                        counts.accepted[e] += 1;
                    }
                }
                if !m.independent(&g.accepted()) {
                    counts.violations += 1;
                }
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;
    let mut total = SelectionCounts::new(n);
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

fn selectability(cfg: &ExperimentConfig, mut report: Report) -> Result<Report> {
    let m = cfg.matroid_spec()?.build()?;
    let n = m.ground_size();
    let x = cfg.marginals()?;
    if x.len() != n {
        return Err(HarnessError::Config(format!("x has {} entries, matroid has {n} elements", x.len())));
    }
    if n <= MAX_POLYTOPE_ELEMENTS {
        let slack: f64 = match polytope_slack(&m, x) {
            Ok(v) => v,
            Err(e) => return Ok(report.refuse(format!("x is not a valid point: {e}"))),
        };
        if slack < -1e-9 {
            return Ok(report.refuse(format!(
                "x is outside the independence polytope: some set S has x(S) - rank(S) = {:.6}",
                -slack
            )));
        }
    } else {
        report
            .notes
            .push(format!("polytope membership not checked above {MAX_POLYTOPE_ELEMENTS} elements"));
    }
    let params = cfg.ocrs_params(n)?;
    let streams = Streams::new(cfg.seed);
    let (d, drawn) = train_chain(&m, x, &params, &streams.child("train"))?;
    let base: Vec<ElementId> = (0..n).collect();
    let arrival = resolve(&cfg.order, &base, &m, &d, || {
        shrunk_product_source(x.to_vec(), params.b, streams.child("exposure")).draw(EXPOSURE_SAMPLES)
    })?;
    let counts = evaluate_selectability(&m, x, params.b, &d, &arrival, cfg.trials, &streams.child("trials"))?;
    if !d.is_ok() {
        report.notes.push("decomposition failed; every trial counts as zero acceptance".into());
    }
    report.samples.ocrs_vectors = drawn;
    report.samples.evaluation_trials = cfg.trials;
    report.selectability = Some(SelectabilitySummary::from_counts(
        order_name(&cfg.order),
        &counts.active,
        &counts.accepted,
        chain_summary(&m, &d),
        counts.violations,
    ));
    Ok(report)
}

fn train_config(cfg: &ExperimentConfig, n: usize) -> Result<TrainConfig> {
    Ok(TrainConfig {
        epsilon: cfg.epsilon,
        threshold_samples: cfg.threshold_samples(n),
        ocrs: cfg.ocrs_params(n)?,
    })
}

/// Running sums of one policy's evaluation.
#[derive(Clone, Copy, Debug, Default)]
struct RatioSums {
    value: f64,
    opt: f64,
    opt_sq: f64,
    below: f64,
    violations: u64,
}

impl RatioSums {
    fn add(&mut self, o: &Self) {
        self.value += o.value;
        self.opt += o.opt;
        self.opt_sq += o.opt_sq;
        self.below += o.below;
        self.violations += o.violations;
    }
}

/// Sum over `OPT` of values strictly below the element's lowest threshold.
fn below_threshold<M: Matroid + ?Sized>(
    m: &M,
    table: &ThresholdTable,
    v: &[sampled_prophet_core::TieBrokenValue],
) -> Result<(f64, f64)> {
    let opt = m.max_weight_basis(v)?;
    let mut total = 0.0;
    let mut below = 0.0;
    for e in &opt {
        total += v[e].base;
        if v[e] < table.threshold(e, 0) {
            below += v[e].base;
        }
    }
    Ok((below, total))
}

fn prophet_ratio(cfg: &ExperimentConfig, mut report: Report) -> Result<Report> {
    let inst = cfg.instance()?;
    let n = inst.len();
    let tc = train_config(cfg, n)?;
    let policies = cfg.policies.unwrap_or(DEFAULT_POLICIES);
    if policies == 0 {
        return Err(HarnessError::Config("policies must be at least 1".into()));
    }
    let streams = Streams::new(cfg.seed);
    let mut rows = Vec::with_capacity(policies);
    let mut sums = Vec::with_capacity(policies);
    for r in 0..policies {
        let ps = streams.indexed("policy", r as u64);
        let policy = train(&inst, &tc, &ps.child("train"))?;
        report.samples.threshold_vectors += policy.samples.threshold_vectors;
        report.samples.ocrs_vectors += policy.samples.ocrs_vectors;
        let arrival = resolve(&cfg.order, &inst.order, &inst.matroid, &policy.decomposition, || {
            let table = &policy.table;
            let mut source = StreamSource::new(n, ps.child("exposure"), |rng: &mut StreamRng| {
                activation_sample(table, &inst.dists, tc.ocrs.b, rng)
            });
            source.draw(EXPOSURE_SAMPLES)
        })?;
        let eval = ps.child("eval");
        let chunks = cfg.trials.div_ceil(CHUNK);
        let parts: Vec<RatioSums> = (0..chunks)
            .into_par_iter()
            .map(|c| -> Result<RatioSums> {
                let mut rng = eval.rng(c as u64);
                let mut s = RatioSums::default();
                for _ in 0..CHUNK.min(cfg.trials - c * CHUNK) {
                    let v = inst.sample_vector(&mut rng);
                    let order = arrival.for_trial(&mut rng);
                    let out = run_online(&policy, &inst.matroid, &v, &order, &mut rng)?;
                    let (below, opt) = below_threshold(&inst.matroid, &policy.table, &v)?;
                    s.value += out.value;
                    s.opt += opt;
                    s.opt_sq += opt * opt;
                    s.below += below;
                    if !inst.matroid.independent(&out.accepted) {
                        s.violations += 1;
                    }
                }
                Ok(s)
            })
            .collect::<Result<_>>()?;
        let mut total = RatioSums::default();
        for p in &parts {
            total.add(p);
        }
        let t = cfg.trials as f64;
        rows.push(PolicyRow {
            policy: r,
            ok: policy.is_ok(),
            depth: policy.decomposition.depth(),
            mean_value: total.value / t,
            mean_opt: total.opt / t,
            ratio: total.value / total.opt,
            below_threshold_mass: total.below / total.opt,
        });
        sums.push(total);
    }
    report.samples.evaluation_trials = policies * cfg.trials;
    let failed = rows.iter().filter(|r| !r.ok).count();
    if failed == policies {
        return Ok(report.fail(format!("all {policies} policies failed to decompose")));
    }
    let values: Vec<f64> = rows.iter().map(|r| r.mean_value).collect();
    let opts: Vec<f64> = rows.iter().map(|r| r.mean_opt).collect();
    let Some((ratio, stderr)) = ratio_of_means(&values, &opts, Z95) else {
        return Ok(report.fail("expected OPT is zero; the ratio is undefined"));
    };
    let mut pooled = RatioSums::default();
    for s in &sums {
        pooled.add(s);
    }
    let total_trials = (policies * cfg.trials) as f64;
    let mean = pooled.opt / total_trials;
    let var = if total_trials > 1.0 {
        ((pooled.opt_sq - total_trials * mean * mean) / (total_trials - 1.0)).max(0.0)
    } else {
        0.0
    };
    let per_policy = rows.iter().map(|r| r.ratio);
    report.ratio = Some(RatioSummary {
        order: order_name(&cfg.order),
        ratio,
        stderr,
        expected_opt: MeanEstimate {
            mean,
            stderr: (var / total_trials).sqrt(),
            trials: policies * cfg.trials,
        },
        min_policy_ratio: per_policy.clone().fold(f64::INFINITY, f64::min),
        max_policy_ratio: per_policy.fold(f64::NEG_INFINITY, f64::max),
        policies: rows,
        failed_policies: failed,
        below_threshold_mass: pooled.below / pooled.opt,
        independence_violations: pooled.violations,
    });
    if failed > 0 {
        report
            .notes
            .push(format!("{failed} of {policies} policies failed and count as zero value"));
    }
    Ok(report)
}

/// `(sum over OPT below T^(0), sum of OPT)` over `trials` fresh vectors.
pub fn below_threshold_sums<M: Matroid>(
    inst: &Instance<M>,
    table: &ThresholdTable,
    trials: usize,
    streams: &Streams,
) -> Result<(f64, f64)> {
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<(f64, f64)> {
            let mut rng = streams.rng(c as u64);
            let mut acc = (0.0, 0.0);
            for _ in 0..CHUNK.min(trials - c * CHUNK) {
                let v = inst.sample_vector(&mut rng);
                let (b, o) = below_threshold(&inst.matroid, table, &v)?;
                acc.0 += b;
                acc.1 += o;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(parts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1)))
}

fn thresholds_diagnostic(cfg: &ExperimentConfig, mut report: Report) -> Result<Report> {
    let inst = cfg.instance()?;
    let n = inst.len();
    let reps = cfg.repetitions.unwrap_or(DEFAULT_REPETITIONS);
    let diag_trials = cfg.diagnostic_trials.unwrap_or(DEFAULT_DIAGNOSTIC_TRIALS);
    let slack = cfg.slack.unwrap_or(DEFAULT_SLACK);
    let samples = cfg.threshold_samples(n);
    let streams = Streams::new(cfg.seed);
    let mut in_band = 0;
    let mut excess = Vec::with_capacity(reps);
    let mut masses = Vec::with_capacity(reps);
    let mut buckets = 0;
    let mut bands = Vec::new();
    for r in 0..reps {
        let rs = streams.indexed("rep", r as u64);
        let table = learn_thresholds(&inst.matroid, &inst.dists, samples, cfg.epsilon, &rs.child("thresholds"))?;
        let diag = good_threshold_diagnostic(&inst.matroid, &inst.dists, &table, diag_trials, slack, &rs.child("diagnostic"))?;
        buckets = table.buckets;
        bands = diag.bands.clone();
        if diag.all_in_band {
            in_band += 1;
        }
        let worst = diag
            .estimates
            .iter()
            .flat_map(|row| row.iter().zip(&diag.bands).map(|(p, (lo, hi))| (lo - p).max(p - hi).max(0.0)))
            .fold(0.0, f64::max);
        excess.push(worst);
        let (below, opt) = below_threshold_sums(&inst, &table, cfg.trials, &rs.child("mass"))?;
        masses.push(if opt > 0.0 { below / opt } else { 0.0 });
        report.samples.threshold_vectors += samples;
        report.samples.evaluation_trials += diag_trials + cfg.trials;
    }
    if bands.is_empty() {
        bands = (0..buckets).map(|k| good_threshold_band(cfg.epsilon, k, slack)).collect();
    }
    report.thresholds = Some(ThresholdSummary {
        repetitions: reps,
        in_band,
        fraction_in_band: if reps > 0 { in_band as f64 / reps as f64 } else { 0.0 },
        buckets,
        bands,
        max_excess: excess,
        mean_below_threshold_mass: if reps > 0 { masses.iter().sum::<f64>() / reps as f64 } else { 0.0 },
        max_below_threshold_mass: masses.iter().copied().fold(0.0, f64::max),
    });
    Ok(report)
}

fn decomposition_stats(cfg: &ExperimentConfig, mut report: Report) -> Result<Report> {
    let m = cfg.matroid_spec()?.build()?;
    let n = m.ground_size();
    let x = cfg.marginals()?;
    if x.len() != n {
        return Err(HarnessError::Config(format!("x has {} entries, matroid has {n} elements", x.len())));
    }
    let params = cfg.ocrs_params(n)?;
    let reps = cfg.repetitions.unwrap_or(DEFAULT_REPETITIONS);
    let streams = Streams::new(cfg.seed);
    let mut failures = 0;
    let mut depths: Vec<usize> = Vec::new();
    let mut decay = 0;
    for r in 0..reps {
        let (d, drawn) = train_chain(&m, x, &params, &streams.indexed("rep", r as u64))?;
        report.samples.ocrs_vectors += drawn;
        if !d.is_ok() {
            failures += 1;
            continue;
        }
        depths.push(d.depth());
        let ranks = d.ranks(&m);
        let holds = ranks
            .windows(2)
            .zip(&d.thresholds)
            .all(|(w, &c)| w[0] == 0 || (w[1] as f64) < params.b / c * w[0] as f64);
        if holds {
            decay += 1;
        }
    }
    let mut histogram: Vec<(usize, usize)> = Vec::new();
    let mut sorted = depths.clone();
    sorted.sort_unstable();
    for d in sorted {
        match histogram.last_mut() {
            Some((depth, count)) if *depth == d => *count += 1,
            _ => histogram.push((d, 1)),
        }
    }
    report.decomposition = Some(DecompositionSummary {
        repetitions: reps,
        failures,
        failure_rate: if reps > 0 { failures as f64 / reps as f64 } else { 0.0 },
        depth_histogram: histogram,
        mean_depth: if depths.is_empty() {
            0.0
        } else {
            depths.iter().sum::<usize>() as f64 / depths.len() as f64
        },
        rank_decay_holds: decay,
    });
    Ok(report)
}

/// `1/M + M^((s+1)M) / N`, or `None` when it does not fit in a float.
pub fn lower_bound_curve(left: usize, right: usize, s: usize) -> Option<f64> {
    let m = right as f64;
    let v = 1.0 / m + m.powf(((s + 1) * right) as f64) / left as f64;
    v.is_finite().then_some(v)
}

fn lower_bound(cfg: &ExperimentConfig, mut report: Report) -> Result<Report> {
    let lb = cfg
        .lower_bound
        .clone()
        .ok_or_else(|| HarnessError::Config("lower-bound needs a lower_bound section".into()))?;
    let hard = gen_hard_instance(lb.left, lb.right, lb.edge_cap)?;
    let (left, right) = (hard.left, hard.right);
    let n = left * right;
    let reps = cfg.repetitions.unwrap_or(8);
    let streams = Streams::new(cfg.seed);
    let hidden: Vec<usize> = (0..reps)
        .map(|r| streams.indexed("hidden", r as u64).rng(0).random_range(0..left))
        .collect();
    let base = cfg.ocrs_params(n)?;
    let mut rows = Vec::with_capacity(lb.s_values.len());
    for &s in &lb.s_values {
        let params = base.clone().with_s(s);
        let mut pooled = SelectionCounts::new(n);
        let mut failures = 0;
        for (r, &i) in hidden.iter().enumerate() {
            let rs = streams.indexed("rep", r as u64);
            let x = &hard.points[i];
            let (d, drawn) = train_chain(&hard.matroid, x, &params, &rs.indexed("s", s as u64))?;
            report.samples.ocrs_vectors += drawn;
            report.samples.evaluation_trials += cfg.trials;
            if !d.is_ok() {
                failures += 1;
            }
            let arrival = Arrival::Fixed(hard.hidden_last_order(i));
            let counts = evaluate_selectability(&hard.matroid, x, params.b, &d, &arrival, cfg.trials, &rs.child("eval"))?;
            // pool by position relative to the hidden vertex: its star goes
            // to slot 0, the other left vertices keep their relative order
            for e in 0..n {
                let (u, j) = (e / right, e % right);
                let slot = match u.cmp(&i) {
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Less => u + 1,
                    std::cmp::Ordering::Greater => u,
                };
                pooled.active[slot * right + j] += counts.active[e];
                pooled.accepted[slot * right + j] += counts.accepted[e];
            }
            pooled.violations += counts.violations;
        }
        let rows_all: Vec<ElementRow> = (0..n)
            .map(|e| ElementRow::new(e, pooled.active[e], pooled.accepted[e]))
            .collect();
        let star: Vec<ElementRow> = rows_all[..right].to_vec();
        let hidden_min = star
            .iter()
            .filter(|r| r.estimate.is_some())
            .min_by(|a, b| a.estimate.unwrap().total_cmp(&b.estimate.unwrap()))
            .map(|r| crate::stats::Interval {
                estimate: r.estimate.unwrap(),
                low: r.low.unwrap(),
                high: r.high.unwrap(),
            });
        let overall_min = rows_all.iter().filter_map(|r| r.estimate).min_by(f64::total_cmp);
        if pooled.violations > 0 {
            report
                .notes
                .push(format!("s = {s}: {} trials produced a dependent set", pooled.violations));
        }
        rows.push(LowerBoundRow {
            s,
            repetitions: reps,
            failures,
            star_positions: star,
            hidden_min,
            overall_min,
            bound: lower_bound_curve(left, right, s),
        });
    }
    report.notes.push(format!(
        "desk-scale trend on K_{{{left},{right}}}: the bound curve is far above 1 at these sizes"
    ));
    report.lower_bound = Some(rows);
    Ok(report)
}
