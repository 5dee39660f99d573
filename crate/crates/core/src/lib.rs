//! Synthetic over-sampling with the minority and majority classes (SOMM).
//!
//! The crate is organised bottom-up:
//!
//! * [`data`] holds the [`Dataset`] type, min-max normalization and CSV I/O.
//! * [`neighbors`] provides exact k-nearest-neighbor search.
//! * [`sampler`] is the SOMM over-sampler itself, binary and one-vs-rest.
//! * [`baseline`] has random over-sampling and SMOTE for comparison.
//! * [`classifiers`] contains small k-NN, logistic regression and Gaussian
//!   naive Bayes models used to score resampled data.
//! * [`metrics`], [`covdiv`] and [`stats`] evaluate the results.
//! * [`synthetic`] generates the six two-dimensional benchmark geometries.

pub mod baseline;
pub mod classifiers;
pub mod covdiv;
pub mod data;
pub mod error;
pub mod metrics;
pub mod neighbors;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod synthetic;

pub use data::{Dataset, FeatureBounds, NormalizationParams};
pub use error::{Error, Result};
pub use sampler::{SommConfig, SommOutput, SyntheticCount};
