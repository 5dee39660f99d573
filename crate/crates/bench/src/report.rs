//! Run results and their on-disk form.
//!
//! Results are long-form: one row per (repeat, sampler, classifier, metric).
//! Missing values (a sampler that could not run, a metric that is undefined
//! for a repeat) are written as empty cells. Numbers are written in the
//! shortest form that parses back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use somm::stats::mann_whitney_u;

use crate::error::Result;
use crate::spec::ExperimentSpec;

/// Placeholder classifier name for metrics that involve no classifier.
pub const NO_CLASSIFIER: &str = "none";

pub const RESULTS_HEADER: &str = "repeat,sampler,classifier,metric,value";
pub const AGGREGATES_HEADER: &str = "sampler,classifier,metric,n,mean,sd";
pub const BEST_HEADER: &str = "sampler,classifier,metric,mean,sd";
pub const SIGNIFICANCE_HEADER: &str = "metric,classifier,sampler_a,sampler_b,u,p_value";

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub repeat: usize,
    pub sampler: String,
    pub classifier: String,
    pub metric: String,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub sampler: String,
    pub classifier: String,
    pub metric: String,
    /// Non-missing values.
    pub n: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation; 0 for a single value.
    pub sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Significance {
    pub metric: String,
    pub classifier: String,
    pub sampler_a: String,
    pub sampler_b: String,
    pub u: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunResult {
    pub records: Vec<Record>,
    pub aggregates: Vec<Aggregate>,
    /// For each (sampler, metric), the classifier with the highest mean.
    pub best: Vec<Aggregate>,
    pub significance: Vec<Significance>,
}

pub fn mean_sd(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (Some(mean), Some(sd))
}

impl RunResult {
    /// Builds aggregates, best-classifier summaries and Mann-Whitney
    /// comparisons of `reference` against every other sampler.
    ///
    /// `samplers` and `classifiers` fix the report order.
    pub fn from_records(
        records: Vec<Record>,
        samplers: &[String],
        classifiers: &[String],
        reference: Option<&str>,
    ) -> Self {
        let mut metrics: Vec<String> = Vec::new();
        for r in &records {
            if !metrics.contains(&r.metric) {
                metrics.push(r.metric.clone());
            }
        }
        let values = |s: &str, c: &str, m: &str| -> Vec<f64> {
            records
                .iter()
                .filter(|r| r.sampler == s && r.classifier == c && r.metric == m)
                .filter_map(|r| r.value)
                .collect()
        };
        let present = |s: &str, c: &str, m: &str| {
            records
                .iter()
                .any(|r| r.sampler == s && r.classifier == c && r.metric == m)
        };

        let mut aggregates = Vec::new();
        let mut best = Vec::new();
        let mut significance = Vec::new();
        for metric in &metrics {
            for sampler in samplers {
                let mut top: Option<Aggregate> = None;
                for classifier in classifiers {
                    if !present(sampler, classifier, metric) {
                        continue;
                    }
                    let v = values(sampler, classifier, metric);
                    let (mean, sd) = mean_sd(&v);
                    let agg = Aggregate {
                        sampler: sampler.clone(),
                        classifier: classifier.clone(),
                        metric: metric.clone(),
                        n: v.len(),
                        mean,
                        sd,
                    };
                    let better = match (&top, mean) {
                        (None, _) => true,
                        (Some(t), Some(m)) => t.mean.is_none_or(|tm| m > tm),
                        (Some(_), None) => false,
                    };
                    if better {
                        top = Some(agg.clone());
                    }
                    aggregates.push(agg);
                }
                best.extend(top);
            }
            let Some(reference) = reference else { continue };
            for classifier in classifiers {
                let a = values(reference, classifier, metric);
                for other in samplers.iter().filter(|s| s.as_str() != reference) {
                    let b = values(other, classifier, metric);
                    if let Ok(mw) = mann_whitney_u(&a, &b) {
                        significance.push(Significance {
                            metric: metric.clone(),
                            classifier: classifier.clone(),
                            sampler_a: reference.to_string(),
                            sampler_b: other.clone(),
                            u: mw.u_a,
                            p_value: mw.p_value,
                        });
                    }
                }
            }
        }
        Self {
            records,
            aggregates,
            best,
            significance,
        }
    }

    pub fn aggregate(&self, sampler: &str, classifier: &str, metric: &str) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.sampler == sampler && a.classifier == classifier && a.metric == metric)
    }

    pub fn best_for(&self, sampler: &str, metric: &str) -> Option<&Aggregate> {
        self.best
            .iter()
            .find(|a| a.sampler == sampler && a.metric == metric)
    }

    pub fn significance_of(
        &self,
        sampler_b: &str,
        classifier: &str,
        metric: &str,
    ) -> Option<&Significance> {
        self.significance
            .iter()
            .find(|s| s.sampler_b == sampler_b && s.classifier == classifier && s.metric == metric)
    }

    pub fn results_csv(&self) -> String {
        let mut out = format!("{RESULTS_HEADER}\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.repeat,
                r.sampler,
                r.classifier,
                r.metric,
                fmt_opt(r.value)
            );
        }
        out
    }

    pub fn aggregates_csv(&self) -> String {
        aggregate_rows(&format!("{AGGREGATES_HEADER}\n"), &self.aggregates, true)
    }

    pub fn best_csv(&self) -> String {
        aggregate_rows(&format!("{BEST_HEADER}\n"), &self.best, false)
    }

    pub fn significance_csv(&self) -> String {
        let mut out = format!("{SIGNIFICANCE_HEADER}\n");
        for s in &self.significance {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                s.metric, s.classifier, s.sampler_a, s.sampler_b, s.u, s.p_value
            );
        }
        out
    }
}

fn aggregate_rows(header: &str, rows: &[Aggregate], with_n: bool) -> String {
    let mut out = header.to_string();
    for a in rows {
        let n = if with_n {
            format!("{},", a.n)
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "{},{},{},{n}{},{}",
            a.sampler,
            a.classifier,
            a.metric,
            fmt_opt(a.mean),
            fmt_opt(a.sd)
        );
    }
    out
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Seeds used by one repeat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepeatSeeds {
    pub repeat: usize,
    pub seed: u64,
    pub data: u64,
    pub split: u64,
    pub downsample: u64,
    pub sampler: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub version: String,
    pub spec: ExperimentSpec,
    pub base_seed: u64,
    pub repeat_seeds: Vec<RepeatSeeds>,
    pub files: Vec<String>,
}

pub const RESULT_FILES: [&str; 4] = [
    "results.csv",
    "aggregates.csv",
    "best.csv",
    "significance.csv",
];

/// Writes the four CSV files and `manifest.json` into `dir`.
pub fn write_outputs(dir: &Path, result: &RunResult, manifest: &Manifest) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(RESULT_FILES[0]), result.results_csv())?;
    fs::write(dir.join(RESULT_FILES[1]), result.aggregates_csv())?;
    fs::write(dir.join(RESULT_FILES[2]), result.best_csv())?;
    fs::write(dir.join(RESULT_FILES[3]), result.significance_csv())?;
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(dir.join("manifest.json"), json + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(repeat: usize, sampler: &str, classifier: &str, value: Option<f64>) -> Record {
        Record {
            repeat,
            sampler: sampler.into(),
            classifier: classifier.into(),
            metric: "g_mean".into(),
            value,
        }
    }

    #[test]
    fn aggregates_skip_missing_values() {
        let records = vec![
            rec(0, "somm", "knn", Some(0.5)),
            rec(1, "somm", "knn", Some(0.7)),
            rec(2, "somm", "knn", None),
            rec(0, "somm", "gnb", Some(0.9)),
            rec(1, "somm", "gnb", Some(0.8)),
            rec(0, "none", "knn", None),
            rec(0, "none", "gnb", Some(0.1)),
        ];
        let r = RunResult::from_records(
            records,
            &["somm".into(), "none".into()],
            &["knn".into(), "gnb".into()],
            Some("somm"),
        );
        let a = r.aggregate("somm", "knn", "g_mean").unwrap();
        assert_eq!(a.n, 2);
        assert!((a.mean.unwrap() - 0.6).abs() < 1e-15);
        assert!((a.sd.unwrap() - 0.02f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.best_for("somm", "g_mean").unwrap().classifier, "gnb");
        assert_eq!(r.best_for("none", "g_mean").unwrap().classifier, "gnb");
        let missing = r.aggregate("none", "knn", "g_mean").unwrap();
        assert_eq!((missing.n, missing.mean), (0, None));
        assert!(r.results_csv().contains("2,somm,knn,g_mean,\n"));
        assert!(r.aggregates_csv().starts_with(AGGREGATES_HEADER));
        assert!(r.significance_of("none", "gnb", "g_mean").is_some());
        assert!(r.significance_of("none", "knn", "g_mean").is_none());
    }

    #[test]
    fn mean_sd_edge_cases() {
        assert_eq!(mean_sd(&[]), (None, None));
        assert_eq!(mean_sd(&[3.0]), (Some(3.0), Some(0.0)));
    }
}
