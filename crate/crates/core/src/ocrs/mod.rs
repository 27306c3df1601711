//! Online contention resolution from samples.
//!
//! Training builds a chain decomposition from (shrunk) active-set samples;
//! at run time, each active element is offered to a greedy restricted to its
//! layer.

mod decompose;
mod greedy;
pub mod measure;
mod params;
mod select;
mod source;

pub use decompose::{decompose_exact, decompose_sampled, ChainDecomposition, DecompositionStatus};
pub use greedy::{run_layered_greedy, LayeredGreedy};
pub use measure::{
    sample_product, span_probabilities, span_probability, Atoms, EmpiricalMeasure, ExactMeasure,
    Histogram, MonteCarloMeasure, SpanMeasure, MAX_EXACT_ELEMENTS,
};
pub use params::{
    default_k, default_max_layers, default_s, threshold_grid, OcrsParams, DEFAULT_SAMPLE_CONSTANT,
};
pub use select::{select, select_exact, select_in_order, select_sampled};
pub use source::{shrink, shrunk_product_source, SampleList, SampleSource, StreamSource, DRAW_CHUNK};
