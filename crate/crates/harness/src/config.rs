//! Experiment configuration files.

use std::fmt;
use std::str::FromStr;

use sampled_prophet_core::matroid::MatroidSpec;
use sampled_prophet_core::ocrs::{threshold_grid, OcrsParams, DEFAULT_SAMPLE_CONSTANT};
use sampled_prophet_core::thresholds::{default_threshold_samples, DEFAULT_SAMPLE_CONSTANT as THRESHOLD_CONSTANT};
use sampled_prophet_core::{ElementId, Instance, InstanceSpec, ValueDistribution};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Selectability,
    ProphetRatio,
    ThresholdsDiagnostic,
    LowerBound,
    DecompositionStats,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        Self::Selectability,
        Self::ProphetRatio,
        Self::ThresholdsDiagnostic,
        Self::LowerBound,
        Self::DecompositionStats,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Selectability => "selectability",
            Self::ProphetRatio => "prophet-ratio",
            Self::ThresholdsDiagnostic => "thresholds-diagnostic",
            Self::LowerBound => "lower-bound",
            Self::DecompositionStats => "decomposition-stats",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment kind {s:?}")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderMode {
    #[default]
    Identity,
    Reverse,
    RandomPerTrial,
    /// Least exposed elements first, most exposed last.
    AdversarialHeuristic,
    /// An explicit permutation.
    Fixed(Vec<ElementId>),
}

/// Optional overrides of the sample-size and shape parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Threshold-learning vectors `N`.
    pub threshold_samples: Option<usize>,
    /// Constant in the default `N`.
    pub threshold_constant: Option<f64>,
    /// Samples per decomposition layer.
    pub s: Option<usize>,
    /// Constant `C_s` in the default `s`.
    pub sample_constant: Option<f64>,
    pub k: Option<usize>,
    pub max_layers: Option<usize>,
    pub b: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowerBoundConfig {
    /// `N`, the left side of `K_{N,M}`.
    pub left: usize,
    /// `M`, the right side.
    pub right: usize,
    /// Sample sizes to compare; zero means no training.
    pub s_values: Vec<usize>,
    /// Largest allowed edge count.
    #[serde(default = "default_edge_cap")]
    pub edge_cap: usize,
}

fn default_edge_cap() -> usize {
    256
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_trials() -> usize {
    10_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional here; the command line names the kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matroid: Option<MatroidSpec>,
    /// Marginals of the active set, for selectability and decomposition runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dists: Option<Vec<ValueDistribution>>,
    #[serde(default)]
    pub order: OrderMode,
    #[serde(default)]
    pub overrides: Overrides,
    /// Independently trained policies (prophet ratio, lower bound).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policies: Option<usize>,
    /// Independent repetitions (thresholds diagnostic, decomposition stats).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repetitions: Option<usize>,
    /// Monte Carlo trials inside each diagnostic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic_trials: Option<usize>,
    /// Slack added to each side of the good-threshold band.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<LowerBoundConfig>,
}

impl ExperimentConfig {
    /// A bare config for `kind`; fill in the instance fields afterwards.
    pub fn new(kind: ExperimentKind, seed: u64) -> Self {
        Self {
            kind: Some(kind),
            seed,
            trials: default_trials(),
            epsilon: default_epsilon(),
            matroid: None,
            x: None,
            dists: None,
            order: OrderMode::Identity,
            overrides: Overrides::default(),
            policies: None,
            repetitions: None,
            diagnostic_trials: None,
            slack: None,
            lower_bound: None,
        }
    }

    /// Parses JSON, reporting the line and column of any error.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            HarnessError::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(HarnessError::Config(format!("epsilon {} outside (0, 1)", self.epsilon)));
        }
        Ok(())
    }

    pub fn kind(&self) -> Result<ExperimentKind> {
        self.kind
            .ok_or_else(|| HarnessError::Config("experiment kind missing".into()))
    }

    pub fn matroid_spec(&self) -> Result<&MatroidSpec> {
        self.matroid
            .as_ref()
            .ok_or_else(|| HarnessError::Config(format!("{} needs a matroid", self.kind_name())))
    }

    pub fn marginals(&self) -> Result<&[f64]> {
        self.x
            .as_deref()
            .ok_or_else(|| HarnessError::Config(format!("{} needs marginals x", self.kind_name())))
    }

    pub fn instance(&self) -> Result<Instance> {
        let dists = self
            .dists
            .clone()
            .ok_or_else(|| HarnessError::Config(format!("{} needs value distributions", self.kind_name())))?;
        let order = match &self.order {
            OrderMode::Fixed(p) => Some(p.clone()),
            _ => None,
        };
        Ok(InstanceSpec {
            matroid: self.matroid_spec()?.clone(),
            dists,
            order,
        }
        .build()?)
    }

    fn kind_name(&self) -> &'static str {
        self.kind.map_or("experiment", ExperimentKind::name)
    }

    /// Decomposition parameters for ground size `n`, overrides applied.
    pub fn ocrs_params(&self, n: usize) -> Result<OcrsParams> {
        let o = &self.overrides;
        let mut p = OcrsParams::with_constant(n, self.epsilon, o.sample_constant.unwrap_or(DEFAULT_SAMPLE_CONSTANT))?;
        if let Some(k) = o.k {
            p.k = k;
            p.c = threshold_grid(k, self.epsilon);
        }
        if let Some(s) = o.s {
            p.s = s;
        }
        if let Some(l) = o.max_layers {
            p.max_layers = l;
        }
        if let Some(b) = o.b {
            p.b = b;
        }
        // s = 0 is allowed here and means an untrained single-layer greedy
        if p.s > 0 {
            p.validate()?;
        }
        Ok(p)
    }

    /// Threshold-learning sample count for ground size `n`.
    pub fn threshold_samples(&self, n: usize) -> usize {
        let o = &self.overrides;
        o.threshold_samples.unwrap_or_else(|| {
            default_threshold_samples(n, self.epsilon, o.threshold_constant.unwrap_or(THRESHOLD_CONSTANT))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reports_locations() {
        let cfg = ExperimentConfig::from_json(
            r#"{"seed": 3, "matroid": {"kind": "uniform", "n": 2, "rank": 1}, "x": [0.5, 0.5], "order": "reverse"}"#,
        )
        .unwrap();
        assert_eq!(cfg.trials, 10_000);
        assert_eq!(cfg.order, OrderMode::Reverse);
        let err = ExperimentConfig::from_json("{\n \"seed\": 1,\n \"bogus\": 2}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert!(ExperimentConfig::from_json(r#"{"kind": "nope", "seed": 1}"#).is_err());
        assert!("nope".parse::<ExperimentKind>().is_err());
        assert_eq!("lower-bound".parse::<ExperimentKind>().unwrap(), ExperimentKind::LowerBound);
    }

    #[test]
    fn overrides_apply() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Selectability, 1);
        cfg.overrides.s = Some(123);
        cfg.overrides.k = Some(4);
        let p = cfg.ocrs_params(8).unwrap();
        assert_eq!((p.s, p.k, p.c.len()), (123, 4, 5));
        cfg.overrides.threshold_samples = Some(77);
        assert_eq!(cfg.threshold_samples(8), 77);
        let fixed: OrderMode = serde_json::from_str(r#"{"fixed": [1, 0]}"#).unwrap();
        assert_eq!(fixed, OrderMode::Fixed(vec![1, 0]));
    }
}
