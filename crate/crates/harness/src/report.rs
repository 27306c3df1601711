//! Experiment reports and their JSON and CSV forms.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use sampled_prophet_core::prophet::MeanEstimate;
use sampled_prophet_core::rng::stable_hash;
use sampled_prophet_core::ElementId;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::Result;
use crate::stats::{binomial_stderr, wilson, Interval, Z95};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ReportStatus {
    Ok,
    Refused { reason: String },
    Error { message: String },
}

/// Conditional acceptance of one element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementRow {
    pub element: ElementId,
    /// Trials in which the element was active.
    pub active: u64,
    pub accepted: u64,
    /// `None` when the element was never active.
    pub estimate: Option<f64>,
    pub stderr: Option<f64>,
    pub low: Option<f64>,
    pub high: Option<f64>,
}

impl ElementRow {
    pub fn new(element: ElementId, active: u64, accepted: u64) -> Self {
        let ci = wilson(accepted, active, Z95);
        Self {
            element,
            active,
            accepted,
            estimate: ci.map(|c| c.estimate),
            stderr: ci.map(|_| binomial_stderr(accepted, active)),
            low: ci.map(|c| c.low),
            high: ci.map(|c| c.high),
        }
    }
}

/// Shape of a trained chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub ok: bool,
    pub depth: usize,
    pub ranks: Vec<usize>,
    pub layer_sizes: Vec<usize>,
    pub thresholds: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectabilitySummary {
    pub order: String,
    pub elements: Vec<ElementRow>,
    /// Smallest estimate over elements with data.
    pub min_estimate: Option<f64>,
    pub min_element: Option<ElementId>,
    /// Smallest Wilson lower bound over elements with data.
    pub min_low: Option<f64>,
    pub chain: ChainSummary,
    pub independence_violations: u64,
}

impl SelectabilitySummary {
    pub fn from_counts(
        order: String,
        active: &[u64],
        accepted: &[u64],
        chain: ChainSummary,
        independence_violations: u64,
    ) -> Self {
        let elements: Vec<ElementRow> = active
            .iter()
            .zip(accepted)
            .enumerate()
            .map(|(e, (&a, &k))| ElementRow::new(e, a, k))
            .collect();
        let min = elements
            .iter()
            .filter_map(|r| r.estimate.map(|p| (p, r.element)))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        let min_low = elements.iter().filter_map(|r| r.low).min_by(f64::total_cmp);
        Self {
            order,
            elements,
            min_estimate: min.map(|m| m.0),
            min_element: min.map(|m| m.1),
            min_low,
            chain,
            independence_violations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyRow {
    pub policy: usize,
    pub ok: bool,
    pub depth: usize,
    pub mean_value: f64,
    pub mean_opt: f64,
    pub ratio: f64,
    pub below_threshold_mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub order: String,
    /// Pooled `E[ALG] / E[OPT]` with a policy-clustered normal interval.
    pub ratio: Interval,
    pub stderr: f64,
    pub expected_opt: MeanEstimate,
    pub policies: Vec<PolicyRow>,
    pub failed_policies: usize,
    pub min_policy_ratio: f64,
    pub max_policy_ratio: f64,
    /// `E[sum over OPT of v_i 1{v_i < T_i^(0)}] / E[OPT]`, pooled.
    pub below_threshold_mass: f64,
    pub independence_violations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSummary {
    pub repetitions: usize,
    pub in_band: usize,
    pub fraction_in_band: f64,
    pub buckets: usize,
    pub bands: Vec<(f64, f64)>,
    /// Worst distance outside its band per repetition, zero when inside.
    pub max_excess: Vec<f64>,
    pub mean_below_threshold_mass: f64,
    pub max_below_threshold_mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub repetitions: usize,
    pub failures: usize,
    pub failure_rate: f64,
    /// `(depth, count)` for successful runs, by depth.
    pub depth_histogram: Vec<(usize, usize)>,
    pub mean_depth: f64,
    pub rank_decay_holds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRow {
    pub s: usize,
    pub repetitions: usize,
    pub failures: usize,
    /// Selectability of the `j`-th edge of the hidden star, pooled over
    /// repetitions.
    pub star_positions: Vec<ElementRow>,
    /// Worst star position.
    pub hidden_min: Option<Interval>,
    /// Worst element overall, pooled the same way.
    pub overall_min: Option<f64>,
    /// `1/M + M^((s+1)M) / N`, absent when it overflows.
    pub bound: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleCounts {
    pub threshold_vectors: usize,
    pub ocrs_vectors: usize,
    pub evaluation_trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: ExperimentKind,
    #[serde(flatten)]
    pub status: ReportStatus,
    pub version: String,
    pub seed: u64,
    /// Hash of version and config, hex.
    pub fingerprint: String,
    /// Seconds since the epoch; the only field allowed to vary between runs.
    pub timestamp: u64,
    pub config: ExperimentConfig,
    pub samples: SampleCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selectability: Option<SelectabilitySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<RatioSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<Vec<LowerBoundRow>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(kind: ExperimentKind, config: &ExperimentConfig) -> Self {
        let fingerprint = stable_hash(format!("{VERSION}\n{}", config.to_json()).as_bytes());
        Self {
            kind,
            status: ReportStatus::Ok,
            version: VERSION.to_string(),
            seed: config.seed,
            fingerprint: format!("{fingerprint:016x}"),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            config: config.clone(),
            samples: SampleCounts::default(),
            selectability: None,
            ratio: None,
            thresholds: None,
            decomposition: None,
            lower_bound: None,
            notes: Vec::new(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == ReportStatus::Ok
    }

    pub fn refuse(mut self, reason: impl Into<String>) -> Self {
        self.status = ReportStatus::Refused { reason: reason.into() };
        self
    }

    pub fn fail(mut self, message: impl Into<String>) -> Self {
        self.status = ReportStatus::Error { message: message.into() };
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the timestamp zeroed, for reproducibility comparisons.
    pub fn deterministic_json(&self) -> String {
        let mut copy = self.clone();
        copy.timestamp = 0;
        copy.to_json()
    }

    /// The report's main table as CSV.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if let Some(block) = &self.selectability {
            w.write_record(["order", "element", "active", "accepted", "estimate", "stderr", "low", "high"])?;
            for r in &block.elements {
                w.write_record([
                    block.order.clone(),
                    r.element.to_string(),
                    r.active.to_string(),
                    r.accepted.to_string(),
                    opt(r.estimate),
                    opt(r.stderr),
                    opt(r.low),
                    opt(r.high),
                ])?;
            }
        } else if let Some(ratio) = &self.ratio {
            w.write_record(["policy", "ok", "depth", "mean_value", "mean_opt", "ratio", "below_threshold_mass"])?;
            for p in &ratio.policies {
                w.write_record([
                    p.policy.to_string(),
                    p.ok.to_string(),
                    p.depth.to_string(),
                    p.mean_value.to_string(),
                    p.mean_opt.to_string(),
                    p.ratio.to_string(),
                    p.below_threshold_mass.to_string(),
                ])?;
            }
        } else if let Some(rows) = &self.lower_bound {
            w.write_record(["s", "repetitions", "failures", "hidden_min", "hidden_low", "hidden_high", "overall_min", "bound"])?;
            for r in rows {
                w.write_record([
                    r.s.to_string(),
                    r.repetitions.to_string(),
                    r.failures.to_string(),
                    opt(r.hidden_min.map(|i| i.estimate)),
                    opt(r.hidden_min.map(|i| i.low)),
                    opt(r.hidden_min.map(|i| i.high)),
                    opt(r.overall_min),
                    opt(r.bound),
                ])?;
            }
        } else if let Some(t) = &self.thresholds {
            w.write_record(["repetition", "max_excess"])?;
            for (i, e) in t.max_excess.iter().enumerate() {
                w.write_record([i.to_string(), e.to_string()])?;
            }
        } else if let Some(d) = &self.decomposition {
            w.write_record(["depth", "count"])?;
            for (depth, count) in &d.depth_histogram {
                w.write_record([depth.to_string(), count.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
