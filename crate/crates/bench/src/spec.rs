//! Declarative experiment description, read from JSON.
//!
//! ```json
//! {
//!   "data_source": { "synthetic": { "family": "sd1", "n_majority": 100, "n_minority": 20 } },
//!   "task": "diversity",
//!   "samplers": ["somm", "smote"],
//!   "repeats": 30,
//!   "base_seed": 7
//! }
//! ```
//!
//! Omitted fields take the defaults of [`ExperimentSpec::default`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use somm::classifiers::ClassifierKind;
use somm::synthetic::SyntheticFamily;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Csv(PathBuf),
    Synthetic(SyntheticSource),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSource {
    pub family: SyntheticFamily,
    pub n_majority: usize,
    /// Minority rows generated. In a diversity run this is the number of
    /// minority rows the samplers see; the reference pool is separate.
    pub n_minority: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Diversity,
    Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Somm,
    Smote,
    Random,
    None,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Somm => "somm",
            SamplerKind::Smote => "smote",
            SamplerKind::Random => "random",
            SamplerKind::None => "none",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        [
            SamplerKind::Somm,
            SamplerKind::Smote,
            SamplerKind::Random,
            SamplerKind::None,
        ]
        .into_iter()
        .find(|k| k.name().eq_ignore_ascii_case(s))
        .ok_or_else(|| BenchError::Spec(format!("unknown sampler {s:?}")))
    }
}

/// How far the training minority class is reduced before resampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImbalanceLevel {
    /// Minority share of the training set, e.g. 0.05 or 0.01.
    Fraction(f64),
    /// Exact number of minority rows kept.
    Absolute(usize),
    AsIs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub data_source: DataSource,
    pub task: Task,
    pub samplers: Vec<SamplerKind>,
    pub imbalance_level: ImbalanceLevel,
    pub repeats: usize,
    /// Training share of the stratified split.
    pub split: f64,
    pub k_somm: usize,
    pub classifiers: Vec<ClassifierKind>,
    pub base_seed: u64,
    /// When set, every `somm` sampler entry is run once per listed k and
    /// reported as `somm_k<k>`.
    pub k_values: Option<Vec<usize>>,
    pub smote_k: usize,
    pub knn_k: usize,
    pub max_attempts_factor: usize,
    /// Class to treat as minority in binary data; defaults to the smallest
    /// class (lowest id on ties).
    pub minority_label: Option<usize>,
    pub cells_per_dim: usize,
    /// Size of the reference minority sample in diversity runs.
    pub reference_pool: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            data_source: DataSource::Synthetic(SyntheticSource {
                family: SyntheticFamily::Sd1,
                n_majority: 100,
                n_minority: 20,
            }),
            task: Task::Classification,
            samplers: vec![
                SamplerKind::None,
                SamplerKind::Somm,
                SamplerKind::Smote,
                SamplerKind::Random,
            ],
            imbalance_level: ImbalanceLevel::AsIs,
            repeats: 30,
            split: 0.75,
            k_somm: 15,
            classifiers: ClassifierKind::ALL.to_vec(),
            base_seed: 0,
            k_values: None,
            smote_k: 5,
            knn_k: 5,
            max_attempts_factor: 50,
            minority_label: None,
            cells_per_dim: 10,
            reference_pool: 500,
        }
    }
}

/// One sampler as it appears in reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerSetup {
    pub label: String,
    pub kind: SamplerKind,
    /// Neighborhood size (SOMM k or SMOTE k); unused otherwise.
    pub k: usize,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| BenchError::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Spec(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(BenchError::Spec(msg));
        if !(self.split > 0.0 && self.split < 1.0) {
            return fail(format!("split must lie in (0, 1), got {}", self.split));
        }
        if self.repeats == 0 {
            return fail("repeats must be at least 1".into());
        }
        match self.imbalance_level {
            ImbalanceLevel::Fraction(f) if !(f > 0.0 && f <= 0.5) => {
                return fail(format!("imbalance fraction must lie in (0, 0.5], got {f}"))
            }
            ImbalanceLevel::Absolute(0) => {
                return fail("absolute imbalance level must be at least 1".into())
            }
            _ => {}
        }
        if self.samplers.is_empty() {
            return fail("at least one sampler is required".into());
        }
        if self.task == Task::Classification && self.classifiers.is_empty() {
            return fail("classification needs at least one classifier".into());
        }
        if self.k_somm == 0 || self.smote_k == 0 || self.knn_k == 0 || self.max_attempts_factor == 0
        {
            return fail(
                "k_somm, smote_k, knn_k and max_attempts_factor must be at least 1".into(),
            );
        }
        if let Some(ks) = &self.k_values {
            if ks.is_empty() || ks.contains(&0) {
                return fail("k_values must be a non-empty list of positive integers".into());
            }
        }
        if self.cells_per_dim == 0 {
            return fail("cells_per_dim must be at least 1".into());
        }
        if let DataSource::Synthetic(s) = &self.data_source {
            if s.n_majority == 0 || s.n_minority == 0 {
                return fail("synthetic class counts must be at least 1".into());
            }
        }
        if self.task == Task::Diversity {
            match &self.data_source {
                DataSource::Synthetic(s) if s.n_minority <= self.reference_pool => {}
                DataSource::Synthetic(_) => {
                    return fail("diversity runs need n_minority <= reference_pool".into());
                }
                DataSource::Csv(_) => {
                    return fail("diversity runs need a synthetic data source".into())
                }
            }
        }
        Ok(())
    }

    /// Samplers in report order, with `somm` expanded over `k_values`.
    pub fn sampler_setups(&self) -> Vec<SamplerSetup> {
        let mut out = Vec::new();
        for &kind in &self.samplers {
            match (kind, &self.k_values) {
                (SamplerKind::Somm, Some(ks)) => out.extend(ks.iter().map(|&k| SamplerSetup {
                    label: format!("somm_k{k}"),
                    kind,
                    k,
                })),
                _ => out.push(SamplerSetup {
                    label: kind.name().to_string(),
                    kind,
                    k: match kind {
                        SamplerKind::Somm => self.k_somm,
                        SamplerKind::Smote => self.smote_k,
                        _ => 0,
                    },
                }),
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_takes_defaults() {
        let spec = ExperimentSpec::from_json(
            r#"{"data_source": {"synthetic": {"family": "sd2", "n_majority": 100, "n_minority": 20}},
                "task": "diversity", "samplers": ["somm", "smote"], "base_seed": 3}"#,
        )
        .unwrap();
        assert_eq!(spec.repeats, 30);
        assert_eq!(spec.split, 0.75);
        assert_eq!(spec.k_somm, 15);
        assert_eq!(spec.samplers, vec![SamplerKind::Somm, SamplerKind::Smote]);
        assert_eq!(spec.base_seed, 3);
    }

    #[test]
    fn levels_and_sources_parse() {
        let spec = ExperimentSpec::from_json(
            r#"{"data_source": {"csv": "data/x.csv"}, "imbalance_level": {"fraction": 0.01},
                "classifiers": ["knn", "logreg"]}"#,
        )
        .unwrap();
        assert_eq!(spec.data_source, DataSource::Csv("data/x.csv".into()));
        assert_eq!(spec.imbalance_level, ImbalanceLevel::Fraction(0.01));
        let spec = ExperimentSpec::from_json(r#"{"imbalance_level": {"absolute": 6}}"#).unwrap();
        assert_eq!(spec.imbalance_level, ImbalanceLevel::Absolute(6));
        let spec = ExperimentSpec::from_json(r#"{"imbalance_level": "as_is"}"#).unwrap();
        assert_eq!(spec.imbalance_level, ImbalanceLevel::AsIs);
    }

    #[test]
    fn invalid_specs() {
        for bad in [
            r#"{"split": 1.0}"#,
            r#"{"repeats": 0}"#,
            r#"{"imbalance_level": {"fraction": 0.7}}"#,
            r#"{"imbalance_level": {"absolute": 0}}"#,
            r#"{"samplers": ["adasyn"]}"#,
            r#"{"unknown_field": 1}"#,
            r#"{"task": "diversity", "data_source": {"csv": "x.csv"}}"#,
            r#"{"k_values": []}"#,
        ] {
            assert!(ExperimentSpec::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn k_values_expand_somm() {
        let spec = ExperimentSpec {
            samplers: vec![SamplerKind::None, SamplerKind::Somm],
            k_values: Some(vec![5, 10, 15]),
            ..ExperimentSpec::default()
        };
        let labels: Vec<String> = spec.sampler_setups().into_iter().map(|s| s.label).collect();
        assert_eq!(labels, vec!["none", "somm_k5", "somm_k10", "somm_k15"]);
    }

    #[test]
    fn json_round_trip() {
        let spec = ExperimentSpec {
            k_values: Some(vec![5]),
            minority_label: Some(1),
            ..ExperimentSpec::default()
        };
        assert_eq!(ExperimentSpec::from_json(&spec.to_json()).unwrap(), spec);
    }
}
