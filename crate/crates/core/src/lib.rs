//! Sample-based matroid prophet inequalities and online contention
//! resolution schemes.
//!
//! The crate is organised bottom-up:
//!
//! * [`matroid`]: independence oracles, concrete families, greedy, exchange.
//! * [`values`]: value distributions and tie-broken values.
//! * [`thresholds`]: exchange values, quantile thresholds, activation.
//! * [`ocrs`]: protected-set selection, chain decomposition, layered greedy.
//! * [`prophet`]: the two-stage prophet policy built from the pieces above.
//!
//! Probability computations are generic over [`Scalar`], so exact rationals
//! can stand in for floats wherever a comparison must not be perturbed.

pub mod error;
pub mod generate;
pub mod matroid;
pub mod ocrs;
pub mod prophet;
pub mod rng;
pub mod scalar;
pub mod set;
pub mod thresholds;
pub mod values;

pub use error::{Error, Result};
pub use matroid::{ConcreteMatroid, Matroid, MatroidExt, MatroidSpec};
pub use ocrs::{ChainDecomposition, OcrsParams};
pub use prophet::{ProphetPolicy, TrainConfig};
pub use rng::{StreamRng, Streams};
pub use scalar::Scalar;
pub use set::{ElementId, ElementSet};
pub use thresholds::ThresholdTable;
pub use values::{Instance, InstanceSpec, TieBroken, TieBrokenValue, ValueDistribution};

/// Exact rational scalar for probability computations.
pub type Rational = num_rational::BigRational;

/// Exact span measure over floats.
pub type ExactMeasureF64 = ocrs::ExactMeasure<f64>;

/// Exact span measure over rationals.
pub type ExactMeasureRational = ocrs::ExactMeasure<Rational>;

/// Exact span measure over single-precision floats.
pub type ExactMeasureF32 = ocrs::ExactMeasure<f32>;
