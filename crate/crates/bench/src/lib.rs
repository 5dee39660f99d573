//! Experiment runner for the somm over-sampler: JSON experiment specs,
//! repeated split/resample/train/score runs, CSV reports and the `somm`
//! command-line tool.

pub mod cli;
pub mod error;
pub mod protocol;
pub mod report;
pub mod runner;
pub mod spec;

pub use error::{BenchError, Result};
pub use report::RunResult;
pub use spec::ExperimentSpec;
