use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Default multiplier in `s = C * k^2 * ln n * ln(1/eps) / eps^2`.
pub const DEFAULT_SAMPLE_CONSTANT: f64 = 8.0;

/// Parameters of the sample-trained decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OcrsParams {
    pub epsilon: f64,
    /// Shrink factor applied to every active set.
    pub b: f64,
    pub k: usize,
    /// `c_1..c_{k+1}`, stored zero-based.
    pub c: Vec<f64>,
    /// Fresh samples per layer.
    pub s: usize,
    pub max_layers: usize,
}

/// `k = max(2, ceil(ln n / (ln(1+eps) * log_{1/4}(1-eps))))`.
pub fn default_k(n: usize, epsilon: f64) -> usize {
    let n = n.max(1) as f64;
    let log_quarter = (1.0 - epsilon).ln() / 0.25f64.ln();
    let raw = n.ln() / ((1.0 + epsilon).ln() * log_quarter);
    ((raw - 1e-9).ceil() as usize).max(2)
}

/// Arithmetic grid from `1/2 + eps/2` to `1/2 + eps` in `k` steps.
pub fn threshold_grid(k: usize, epsilon: f64) -> Vec<f64> {
    (0..=k)
        .map(|j| 0.5 + epsilon / 2.0 + epsilon * j as f64 / (2.0 * k as f64))
        .collect()
}

/// `ceil(C * k^2 * ln n * ln(1/eps) / eps^2)`, with `n` raised to 2 so a
/// single element still gets more than one sample.
pub fn default_s(n: usize, k: usize, epsilon: f64, constant: f64) -> usize {
    let n = n.max(2) as f64;
    let raw = constant * (k * k) as f64 * n.ln() * (1.0 / epsilon).ln() / (epsilon * epsilon);
    (raw.ceil() as usize).max(1)
}

/// `ceil(log_{1+eps} n) + 2`.
pub fn default_max_layers(n: usize, epsilon: f64) -> usize {
    let n = n.max(2) as f64;
    (n.ln() / (1.0 + epsilon).ln() - 1e-9).ceil() as usize + 2
}

impl OcrsParams {
    /// Defaults for ground size `n`.
    pub fn default_for(n: usize, epsilon: f64) -> Result<Self> {
        Self::with_constant(n, epsilon, DEFAULT_SAMPLE_CONSTANT)
    }

    pub fn with_constant(n: usize, epsilon: f64, sample_constant: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.25) {
            return invalid(format!("epsilon {epsilon} outside (0, 1/4)"));
        }
        if sample_constant.is_nan() || sample_constant <= 0.0 {
            return invalid("sample constant must be positive");
        }
        let k = default_k(n, epsilon);
        Ok(Self {
            epsilon,
            b: 0.5,
            k,
            c: threshold_grid(k, epsilon),
            s: default_s(n, k, epsilon, sample_constant),
            max_layers: default_max_layers(n, epsilon),
        })
    }

    /// Same parameters with `s` fixed.
    pub fn with_s(mut self, s: usize) -> Self {
        self.s = s;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b <= 1.0) {
            return invalid(format!("shrink factor {} outside (0, 1]", self.b));
        }
        if self.k < 1 || self.c.len() != self.k + 1 {
            return invalid("threshold grid must hold k + 1 values with k >= 1");
        }
        if self.c.windows(2).any(|w| w[0] > w[1]) || self.c.iter().any(|c| !(*c > 0.0 && *c < 1.0)) {
            return invalid("threshold grid must be nondecreasing inside (0, 1)");
        }
        if self.s == 0 {
            return invalid("s must be at least 1");
        }
        Ok(())
    }

    /// `c_hat = (c_j + c_{j+1}) / 2` for zero-based `j < k`.
    pub fn midpoint(&self, j: usize) -> f64 {
        (self.c[j] + self.c[j + 1]) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing_and_floor() {
        let p = OcrsParams::default_for(8, 0.2).unwrap();
        assert_eq!(p.c.len(), p.k + 1);
        assert!((p.c[0] - 0.6).abs() < 1e-12);
        assert!((p.c[p.k] - 0.7).abs() < 1e-12);
        for w in p.c.windows(2) {
            assert!((w[1] - w[0] - 0.2 / (2.0 * p.k as f64)).abs() < 1e-12);
        }
        // half spacing equals eps / (4k)
        assert!(((p.c[1] - p.c[0]) / 2.0 - 0.2 / (4.0 * p.k as f64)).abs() < 1e-12);
        // ln 1 = 0, so only the floor keeps k at 2
        assert_eq!(default_k(1, 0.2), 2);
        assert!(default_k(2, 0.2) > 2);
        assert_eq!(default_s(1, 2, 0.2, 8.0), default_s(2, 2, 0.2, 8.0));
        assert!(OcrsParams::default_for(8, 0.25).is_err());
        assert!(OcrsParams::default_for(8, 0.0).is_err());
        p.validate().unwrap();
    }

    #[test]
    fn round_trips() {
        let p = OcrsParams::default_for(10, 0.1).unwrap().with_s(17);
        let back: OcrsParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        assert_eq!(p.max_layers, default_max_layers(10, 0.1));
        assert_eq!(p.max_layers, (10f64.ln() / 1.1f64.ln()).ceil() as usize + 2);
    }
}
