//! Experiment engine for the sample-based prophet and contention
//! resolution policies: configuration, runners, statistics and reports.

pub mod config;
pub mod error;
pub mod experiments;
pub mod hard;
pub mod order;
pub mod report;
pub mod stats;

pub use config::{ExperimentConfig, ExperimentKind, LowerBoundConfig, OrderMode, Overrides};
pub use error::{HarnessError, Result};
pub use experiments::{run_experiment, run_with_threads};
pub use hard::{gen_hard_instance, HardInstance};
pub use report::{Report, ReportStatus};
