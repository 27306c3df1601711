//! Confidence intervals.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson(successes: u64, trials: u64, z: f64) -> Option<Interval> {
    if trials == 0 {
        return None;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Some(Interval {
        estimate: p,
        low: (center - half).max(0.0),
        high: (center + half).min(1.0),
    })
}

/// Binomial standard error `sqrt(p(1-p)/n)`.
pub fn binomial_stderr(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    let p = successes as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Ratio of means `sum(a) / sum(b)` over clusters, with a delta-method
/// normal interval computed from the cluster-level residuals `a - r b`.
pub fn ratio_of_means(a: &[f64], b: &[f64], z: f64) -> Option<(Interval, f64)> {
    let k = a.len();
    if k == 0 || k != b.len() {
        return None;
    }
    let mean_a = a.iter().sum::<f64>() / k as f64;
    let mean_b = b.iter().sum::<f64>() / k as f64;
    if mean_b <= 0.0 {
        return None;
    }
    let r = mean_a / mean_b;
    let se = if k > 1 {
        let var = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - r * y).powi(2))
            .sum::<f64>()
            / (k - 1) as f64;
        (var / k as f64).sqrt() / mean_b
    } else {
        f64::NAN
    };
    Some((
        Interval {
            estimate: r,
            low: r - z * se,
            high: r + z * se,
        },
        se,
    ))
}
