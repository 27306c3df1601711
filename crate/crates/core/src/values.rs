//! Value distributions and tie-broken values.
//!
//! Every sampled value carries an independent uniform tiebreaker and values
//! compare lexicographically, so point masses never produce ties and the
//! max-weight basis is unique.

use std::cmp::Ordering;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::{ConcreteMatroid, Matroid, MatroidSpec};
use crate::set::ElementId;

/// A value lifted to `(base, tiebreak)` with lexicographic order.
///
/// NaN bases are rejected upstream; comparison treats them as equal.
#[derive(Clone, Copy, Debug)]
pub struct TieBroken<T> {
    pub base: T,
    pub tiebreak: f64,
}

impl<T: PartialOrd> PartialEq for TieBroken<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: PartialOrd> Eq for TieBroken<T> {}

impl<T: PartialOrd> PartialOrd for TieBroken<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: PartialOrd> Ord for TieBroken<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.base
            .partial_cmp(&other.base)
            .unwrap_or(Ordering::Equal)
            .then(self.tiebreak.total_cmp(&other.tiebreak))
    }
}

impl<T> TieBroken<T> {
    pub fn new(base: T, tiebreak: f64) -> Self {
        Self { base, tiebreak }
    }
}

impl TieBroken<f64> {
    /// Zero with a `-inf` tiebreak: strictly below every sampled value.
    pub const FLOOR: Self = Self {
        base: 0.0,
        tiebreak: f64::NEG_INFINITY,
    };

    /// Strictly above every sampled value.
    pub const TOP: Self = Self {
        base: f64::INFINITY,
        tiebreak: f64::INFINITY,
    };

    pub fn is_top(&self) -> bool {
        self.base == f64::INFINITY
    }
}

#[derive(Serialize, Deserialize)]
struct TieBrokenRepr {
    #[serde(with = "extended_f64")]
    base: f64,
    #[serde(with = "extended_f64")]
    tiebreak: f64,
}

impl Serialize for TieBroken<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TieBrokenRepr {
            base: self.base,
            tiebreak: self.tiebreak,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TieBroken<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = TieBrokenRepr::deserialize(d)?;
        Ok(Self::new(r.base, r.tiebreak))
    }
}

/// JSON has no infinities; encode them as strings so sentinels round-trip.
mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Finite(f64),
        Tag(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            Repr::Finite(*v)
        } else if *v > 0.0 {
            Repr::Tag("inf".into())
        } else {
            Repr::Tag("-inf".into())
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Finite(v) => Ok(v),
            Repr::Tag(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Tag(t) if t == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!("bad number {t:?}"))),
        }
    }
}

/// Nonnegative value distributions.
///
/// ```json
/// {"kind": "uniform", "a": 0, "b": 1}
/// {"kind": "discrete", "points": [0, 1], "masses": [0.5, 0.5]}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ValueDistribution {
    Uniform {
        a: f64,
        b: f64,
    },
    Exponential {
        #[serde(alias = "lambda")]
        rate: f64,
    },
    Discrete {
        points: Vec<f64>,
        masses: Vec<f64>,
    },
    /// `value` with probability `p`, else zero.
    BernoulliScaled {
        value: f64,
        p: f64,
    },
    Constant {
        value: f64,
    },
}

const MASS_TOLERANCE: f64 = 1e-9;

fn nonneg(v: f64, what: &str) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDistribution(format!("{what} must be finite and nonnegative, got {v}")))
    }
}

impl ValueDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Uniform { a, b } => {
                nonneg(*a, "uniform lower bound")?;
                nonneg(*b, "uniform upper bound")?;
                if a > b {
                    return Err(Error::InvalidDistribution(format!("uniform bounds reversed: {a} > {b}")));
                }
            }
            Self::Exponential { rate } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(Error::InvalidDistribution(format!("exponential rate must be positive, got {rate}")));
                }
            }
            Self::Discrete { points, masses } => {
                if points.is_empty() || points.len() != masses.len() {
                    return Err(Error::InvalidDistribution(
                        "discrete distribution needs matching nonempty points and masses".into(),
                    ));
                }
                for &p in points {
                    nonneg(p, "discrete point")?;
                }
                for &q in masses {
                    nonneg(q, "discrete mass")?;
                }
                let total: f64 = masses.iter().sum();
                if (total - 1.0).abs() > MASS_TOLERANCE {
                    return Err(Error::InvalidDistribution(format!("masses sum to {total}, not 1")));
                }
            }
            Self::BernoulliScaled { value, p } => {
                nonneg(*value, "bernoulli value")?;
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::InvalidDistribution(format!("bernoulli probability {p} outside [0, 1]")));
                }
            }
            Self::Constant { value } => nonneg(*value, "constant")?,
        }
        Ok(())
    }

    /// Whether the base distribution has no atoms.
    pub fn is_continuous(&self) -> bool {
        match self {
            Self::Uniform { a, b } => a < b,
            Self::Exponential { .. } => true,
            _ => false,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Uniform { a, b } => (a + b) / 2.0,
            Self::Exponential { rate } => 1.0 / rate,
            Self::Discrete { points, masses } => points.iter().zip(masses).map(|(p, q)| p * q).sum(),
            Self::BernoulliScaled { value, p } => value * p,
            Self::Constant { value } => *value,
        }
    }

    /// Draws a base value. Assumes [`validate`](Self::validate) passed.
    pub fn sample_base<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            Self::Exponential { rate } => Exp::new(*rate).expect("validated rate").sample(rng),
            Self::Discrete { points, masses } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (p, q) in points.iter().zip(masses) {
                    acc += q;
                    if u < acc {
                        return *p;
                    }
                }
                *points.last().expect("validated nonempty")
            }
            Self::BernoulliScaled { value, p } => {
                if rng.random::<f64>() < *p {
                    *value
                } else {
                    0.0
                }
            }
            Self::Constant { value } => *value,
        }
    }
}

pub type TieBrokenValue = TieBroken<f64>;

/// Base value from `d` plus an independent uniform tiebreaker.
pub fn sample_value<R: Rng + ?Sized>(d: &ValueDistribution, rng: &mut R) -> TieBrokenValue {
    let base = d.sample_base(rng);
    TieBroken::new(base, rng.random())
}

/// One independent draw per distribution, in element order.
pub fn sample_values<R: Rng + ?Sized>(dists: &[ValueDistribution], rng: &mut R) -> Vec<TieBrokenValue> {
    dists.iter().map(|d| sample_value(d, rng)).collect()
}

/// A matroid with one value distribution per element and an arrival order.
#[derive(Clone, Debug)]
pub struct Instance<M = ConcreteMatroid> {
    pub matroid: M,
    pub dists: Vec<ValueDistribution>,
    pub order: Vec<ElementId>,
}

fn check_permutation(order: &[ElementId], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: order.len(),
        });
    }
    let mut seen = vec![false; n];
    for &e in order {
        if e >= n {
            return Err(Error::OutOfRange { element: e, size: n });
        }
        if std::mem::replace(&mut seen[e], true) {
            return Err(Error::InvalidArgument(format!("arrival order repeats element {e}")));
        }
    }
    Ok(())
}

impl<M: Matroid> Instance<M> {
    /// Identity arrival order.
    pub fn new(matroid: M, dists: Vec<ValueDistribution>) -> Result<Self> {
        let order = (0..matroid.ground_size()).collect();
        Self::with_order(matroid, dists, order)
    }

    pub fn with_order(matroid: M, dists: Vec<ValueDistribution>, order: Vec<ElementId>) -> Result<Self> {
        let n = matroid.ground_size();
        if dists.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: dists.len(),
            });
        }
        for d in &dists {
            d.validate()?;
        }
        check_permutation(&order, n)?;
        Ok(Self { matroid, dists, order })
    }

    pub fn len(&self) -> usize {
        self.dists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dists.is_empty()
    }

    pub fn sample_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<TieBrokenValue> {
        sample_values(&self.dists, rng)
    }
}

/// Serializable form of an [`Instance`] over a built-in matroid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub matroid: MatroidSpec,
    pub dists: Vec<ValueDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<ElementId>>,
}

impl InstanceSpec {
    pub fn build(&self) -> Result<Instance> {
        let m = self.matroid.build()?;
        match &self.order {
            Some(order) => Instance::with_order(m, self.dists.clone(), order.clone()),
            None => Instance::new(m, self.dists.clone()),
        }
    }
}
