//! Repeated experiments.
//!
//! Repeat `r` uses seed `base_seed + r`; each stage draws its own seed from
//! that with [`child_seed`] and a fixed tag, so changing one stage (say, the
//! sampler list) never shifts the randomness of another. Repeats run in
//! parallel and their records are collected in repeat order, which keeps the
//! output identical for any thread count.

use rayon::prelude::*;
use somm::classifiers::{fit, predict, Hyperparams};
use somm::covdiv::covdiv;
use somm::data::read_csv;
use somm::metrics::{confusion, g_mean, mg};
use somm::rng::{child_seed, stream_rng};
use somm::synthetic::{generate, SyntheticFamily, SyntheticSpec};
use somm::Dataset;

use crate::error::{BenchError, Result};
use crate::protocol::{balance, downsample_minority, stratified_split, SamplerParams};
use crate::report::{Manifest, Record, RepeatSeeds, RunResult, NO_CLASSIFIER, RESULT_FILES};
use crate::spec::{DataSource, ExperimentSpec, SamplerKind, SamplerSetup, Task};

pub const TAG_DATA: u64 = 0;
pub const TAG_SPLIT: u64 = 1;
pub const TAG_DOWNSAMPLE: u64 = 2;
pub const TAG_SAMPLER: u64 = 3;

/// Environment variable holding the worker count; unset or 0 means one
/// worker per core.
pub const THREADS_ENV: &str = "SOMM_THREADS";

/// Hooks into a run, used to check which rows each stage sees.
pub trait RunObserver: Sync {
    fn test_rows(&self, _repeat: usize, _test: &Dataset) {}
    fn downsampled(&self, _repeat: usize, _train: &Dataset) {}
    fn sampler_input(&self, _repeat: usize, _sampler: &str, _train: &Dataset) {}
    fn classifier_fit(&self, _repeat: usize, _sampler: &str, _classifier: &str, _train: &Dataset) {}
}

/// Observer that ignores everything.
pub struct NoObserver;

impl RunObserver for NoObserver {}

pub fn repeat_seeds(spec: &ExperimentSpec) -> Vec<RepeatSeeds> {
    (0..spec.repeats)
        .map(|repeat| {
            let seed = spec.base_seed.wrapping_add(repeat as u64);
            RepeatSeeds {
                repeat,
                seed,
                data: child_seed(seed, TAG_DATA),
                split: child_seed(seed, TAG_SPLIT),
                downsample: child_seed(seed, TAG_DOWNSAMPLE),
                sampler: child_seed(seed, TAG_SAMPLER),
            }
        })
        .collect()
}

pub fn manifest(spec: &ExperimentSpec) -> Manifest {
    Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        spec: spec.clone(),
        base_seed: spec.base_seed,
        repeat_seeds: repeat_seeds(spec),
        files: RESULT_FILES.iter().map(|s| s.to_string()).collect(),
    }
}

/// Runs `f` on a pool sized by [`THREADS_ENV`].
pub fn with_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v.trim().parse::<usize>().map_err(|_| {
            BenchError::Spec(format!(
                "{THREADS_ENV} must be a non-negative integer, got {v:?}"
            ))
        })?,
        _ => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| BenchError::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

pub fn run(spec: &ExperimentSpec) -> Result<RunResult> {
    run_observed(spec, &NoObserver)
}

pub fn run_observed(spec: &ExperimentSpec, observer: &dyn RunObserver) -> Result<RunResult> {
    spec.validate()?;
    match spec.task {
        Task::Diversity => run_diversity(spec, observer),
        Task::Classification => run_classification(spec, observer),
    }
}

fn sampler_labels(setups: &[SamplerSetup]) -> Vec<String> {
    setups.iter().map(|s| s.label.clone()).collect()
}

/// Reference sampler for significance tests: the first SOMM entry.
fn reference_label(setups: &[SamplerSetup]) -> Option<String> {
    setups
        .iter()
        .find(|s| s.kind == SamplerKind::Somm)
        .map(|s| s.label.clone())
}

/// Coverage of a large reference minority sample by each sampler's
/// synthetic rows. The samplers see the majority class plus `n_minority`
/// rows drawn from that reference sample.
pub fn run_diversity(spec: &ExperimentSpec, observer: &dyn RunObserver) -> Result<RunResult> {
    let DataSource::Synthetic(source) = spec.data_source else {
        return Err(BenchError::Spec(
            "diversity runs need a synthetic data source".into(),
        ));
    };
    let setups = spec.sampler_setups();
    let seeds = repeat_seeds(spec);
    let per_repeat: Vec<Result<Vec<Record>>> = with_thread_pool(|| {
        seeds
            .par_iter()
            .map(|s| {
                let full = generate(&SyntheticSpec {
                    family: source.family,
                    n_majority: source.n_majority,
                    n_minority: spec.reference_pool,
                    seed: s.data,
                })?;
                let pool_rows: Vec<usize> = (source.n_majority..full.n_rows()).collect();
                let reference = full.select(&pool_rows);
                let mut picked = pool_rows.clone();
                rand::seq::SliceRandom::shuffle(
                    picked.as_mut_slice(),
                    &mut stream_rng(s.downsample, 0),
                );
                picked.truncate(source.n_minority);
                let mut rows: Vec<usize> = (0..source.n_majority).chain(picked).collect();
                rows.sort_unstable();
                let train = full.select(&rows);
                observer.downsampled(s.repeat, &train);
                let params = SamplerParams {
                    max_attempts_factor: spec.max_attempts_factor,
                    seed: s.sampler,
                };
                let mut records = Vec::with_capacity(setups.len());
                for setup in &setups {
                    observer.sampler_input(s.repeat, &setup.label, &train);
                    let value = balance(&train, setup, params).ok().and_then(|balanced| {
                        let synthetic =
                            balanced.features().slice(ndarray::s![train.n_rows().., ..]);
                        covdiv(reference.features().view(), synthetic, spec.cells_per_dim)
                            .ok()
                            .map(|r| r.covdiv)
                    });
                    records.push(Record {
                        repeat: s.repeat,
                        sampler: setup.label.clone(),
                        classifier: NO_CLASSIFIER.into(),
                        metric: "covdiv".into(),
                        value,
                    });
                }
                Ok(records)
            })
            .collect()
    })?;
    let records = flatten(per_repeat)?;
    let reference = reference_label(&setups);
    Ok(RunResult::from_records(
        records,
        &sampler_labels(&setups),
        &[NO_CLASSIFIER.to_string()],
        reference.as_deref(),
    ))
}

fn flatten(per_repeat: Vec<Result<Vec<Record>>>) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for r in per_repeat {
        out.extend(r?);
    }
    Ok(out)
}

/// Smallest class, lowest id on ties.
fn default_minority(data: &Dataset) -> usize {
    let counts = data.class_counts();
    (0..counts.len())
        .filter(|&c| counts[c] > 0)
        .min_by_key(|&c| counts[c])
        .unwrap_or(0)
}

/// Split, reduce the training minority, balance, train and score on the
/// held-out rows. The metric is the g-mean for two classes and the
/// geometric mean of recalls otherwise.
pub fn run_classification(spec: &ExperimentSpec, observer: &dyn RunObserver) -> Result<RunResult> {
    let loaded = match &spec.data_source {
        DataSource::Csv(path) => Some(read_csv(path)?),
        DataSource::Synthetic(_) => None,
    };
    let setups = spec.sampler_setups();
    let seeds = repeat_seeds(spec);
    let hyper = Hyperparams {
        knn_k: spec.knn_k,
        ..Hyperparams::default()
    };
    let per_repeat: Vec<Result<Vec<Record>>> = with_thread_pool(|| {
        seeds
            .par_iter()
            .map(|s| {
                let data = match (&loaded, &spec.data_source) {
                    (Some(d), _) => d.clone(),
                    (None, DataSource::Synthetic(src)) => generate(&SyntheticSpec {
                        family: src.family,
                        n_majority: src.n_majority,
                        n_minority: src.n_minority,
                        seed: s.data,
                    })?,
                    (None, DataSource::Csv(_)) => unreachable!("csv data is loaded up front"),
                };
                let n_classes = data.n_classes();
                let metric = if n_classes == 2 { "g_mean" } else { "mg" };
                let minority = spec
                    .minority_label
                    .unwrap_or_else(|| default_minority(&data));
                if minority >= n_classes {
                    return Err(BenchError::Spec(format!(
                        "minority label {minority} is not a class of the data"
                    )));
                }
                let (train, test) = stratified_split(&data, spec.split, s.split)?;
                observer.test_rows(s.repeat, &test);
                let train =
                    downsample_minority(&train, minority, spec.imbalance_level, s.downsample)?;
                observer.downsampled(s.repeat, &train);
                let params = SamplerParams {
                    max_attempts_factor: spec.max_attempts_factor,
                    seed: s.sampler,
                };
                let mut records = Vec::with_capacity(setups.len() * spec.classifiers.len());
                for setup in &setups {
                    observer.sampler_input(s.repeat, &setup.label, &train);
                    let balanced = balance(&train, setup, params).ok();
                    for &kind in &spec.classifiers {
                        let value = balanced.as_ref().and_then(|b| {
                            observer.classifier_fit(s.repeat, &setup.label, kind.name(), b);
                            let model = fit(b, kind, &hyper).ok()?;
                            let predicted = predict(&model, test.features().view()).ok()?;
                            let cm = confusion(test.labels(), &predicted, n_classes).ok()?;
                            if n_classes == 2 { g_mean(&cm) } else { mg(&cm) }.ok()
                        });
                        records.push(Record {
                            repeat: s.repeat,
                            sampler: setup.label.clone(),
                            classifier: kind.name().into(),
                            metric: metric.into(),
                            value,
                        });
                    }
                }
                Ok(records)
            })
            .collect()
    })?;
    let records = flatten(per_repeat)?;
    let classifiers: Vec<String> = spec
        .classifiers
        .iter()
        .map(|c| c.name().to_string())
        .collect();
    let reference = reference_label(&setups);
    Ok(RunResult::from_records(
        records,
        &sampler_labels(&setups),
        &classifiers,
        reference.as_deref(),
    ))
}

pub const DEFAULT_SWEEP_K: [usize; 3] = [5, 10, 15];

/// Best SOMM k for one synthetic family.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepWinner {
    pub family: SyntheticFamily,
    pub sampler: String,
    pub classifier: String,
    pub mean: f64,
}

/// Classification over every family with SOMM at each k (`k_values`,
/// default 5, 10, 15). Other spec fields apply unchanged; the spec's data
/// source supplies the class sizes.
pub fn run_k_sweep(
    spec: &ExperimentSpec,
) -> Result<Vec<(SyntheticFamily, RunResult, Option<SweepWinner>)>> {
    let DataSource::Synthetic(base) = spec.data_source else {
        return Err(BenchError::Spec(
            "a k sweep needs a synthetic data source".into(),
        ));
    };
    let mut out = Vec::new();
    for family in SyntheticFamily::ALL {
        let mut s = spec.clone();
        s.task = Task::Classification;
        s.data_source = DataSource::Synthetic(crate::spec::SyntheticSource { family, ..base });
        if s.k_values.is_none() {
            s.k_values = Some(DEFAULT_SWEEP_K.to_vec());
        }
        if !s.samplers.contains(&SamplerKind::Somm) {
            s.samplers.push(SamplerKind::Somm);
        }
        let result = run(&s)?;
        let winner = s
            .sampler_setups()
            .iter()
            .filter(|setup| setup.kind == SamplerKind::Somm)
            .filter_map(|setup| {
                let best = result.best.iter().find(|a| a.sampler == setup.label)?;
                Some(SweepWinner {
                    family,
                    sampler: setup.label.clone(),
                    classifier: best.classifier.clone(),
                    mean: best.mean?,
                })
            })
            .fold(None::<SweepWinner>, |acc, w| match acc {
                Some(a) if a.mean >= w.mean => Some(a),
                _ => Some(w),
            });
        out.push((family, result, winner));
    }
    Ok(out)
}

pub fn winners_csv(sweep: &[(SyntheticFamily, RunResult, Option<SweepWinner>)]) -> String {
    let mut out = String::from("family,sampler,classifier,mean\n");
    for (family, _, winner) in sweep {
        match winner {
            Some(w) => out.push_str(&format!(
                "{family},{},{},{}\n",
                w.sampler, w.classifier, w.mean
            )),
            None => out.push_str(&format!("{family},,,\n")),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{ImbalanceLevel, SyntheticSource};

    fn small(task: Task) -> ExperimentSpec {
        ExperimentSpec {
            data_source: DataSource::Synthetic(SyntheticSource {
                family: SyntheticFamily::Sd3,
                n_majority: 60,
                n_minority: 20,
            }),
            task,
            repeats: 3,
            k_somm: 5,
            reference_pool: 100,
            imbalance_level: ImbalanceLevel::AsIs,
            ..ExperimentSpec::default()
        }
    }

    #[test]
    fn diversity_records_every_sampler() {
        let r = run(&small(Task::Diversity)).unwrap();
        assert_eq!(r.records.len(), 3 * 4);
        let none = r.aggregate("none", NO_CLASSIFIER, "covdiv").unwrap();
        assert_eq!(none.mean, Some(0.0));
        let somm = r.aggregate("somm", NO_CLASSIFIER, "covdiv").unwrap();
        assert!(somm.mean.unwrap() > 0.0);
        assert_eq!(r.significance.len(), 3);
    }

    #[test]
    fn classification_is_deterministic() {
        let spec = small(Task::Classification);
        let a = run(&spec).unwrap();
        assert_eq!(a.records.len(), 3 * 4 * 3);
        assert!(a.records.iter().all(|r| r.metric == "g_mean"));
        assert_eq!(a, run(&spec).unwrap());
    }

    #[test]
    fn seeds_follow_base_seed() {
        let spec = ExperimentSpec {
            base_seed: 10,
            repeats: 2,
            ..ExperimentSpec::default()
        };
        let s = repeat_seeds(&spec);
        assert_eq!((s[0].seed, s[1].seed), (10, 11));
        assert_eq!(s[1].split, child_seed(11, TAG_SPLIT));
    }

    #[test]
    fn smallest_class_is_default_minority() {
        let d = Dataset::new(ndarray::Array2::zeros((5, 1)), vec![0, 1, 1, 2, 2]).unwrap();
        assert_eq!(default_minority(&d), 0);
    }
}
