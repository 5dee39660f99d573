//! Per-repeat data preparation: stratified splitting, minority down-sampling
//! and balancing the training set with a chosen sampler.

use rand::seq::SliceRandom;
use somm::baseline::{random_oversample, smote_oversample, SmoteConfig};
use somm::rng::{child_seed, stream_rng};
use somm::sampler::{somm_multiclass, SommConfig, SyntheticCount};
use somm::{Dataset, Error};

use crate::spec::{ImbalanceLevel, SamplerKind, SamplerSetup};

/// Splits every class proportionally: `round(train_fraction * n_c)` rows of
/// class `c` go to training, clamped so both sides get at least one row.
/// Row order inside each part follows the input.
pub fn stratified_split(
    data: &Dataset,
    train_fraction: f64,
    seed: u64,
) -> somm::Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for (class, &count) in data.class_counts().iter().enumerate() {
        if count == 0 {
            continue;
        }
        if count < 2 {
            return Err(Error::InvalidInput(format!(
                "class {class} has a single row and cannot be split"
            )));
        }
        let mut rows: Vec<usize> = (0..data.n_rows())
            .filter(|&i| data.labels()[i] == class)
            .collect();
        rows.shuffle(&mut stream_rng(seed, class as u64));
        let n_train = ((train_fraction * count as f64).round() as usize).clamp(1, count - 1);
        train_idx.extend_from_slice(&rows[..n_train]);
        test_idx.extend_from_slice(&rows[n_train..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((data.select(&train_idx), data.select(&test_idx)))
}

/// Minority rows kept for a level, given `n_majority` majority rows.
///
/// A fraction `L` keeps `round(L * n_majority / (1 - L))` rows so the
/// minority makes up `L` of the result, with a floor of 8 rows at the 1%
/// level and 2 rows otherwise.
pub fn minority_target(level: ImbalanceLevel, n_majority: usize, n_minority: usize) -> usize {
    match level {
        ImbalanceLevel::AsIs => n_minority,
        ImbalanceLevel::Absolute(n) => n,
        ImbalanceLevel::Fraction(f) => {
            let floor = if (f - 0.01).abs() < 1e-12 { 8 } else { 2 };
            let m = (f * n_majority as f64 / (1.0 - f)).round() as usize;
            m.max(floor)
        }
    }
}

/// Randomly drops minority rows until the level is reached; majority rows
/// are untouched and row order is preserved.
pub fn downsample_minority(
    train: &Dataset,
    minority_label: usize,
    level: ImbalanceLevel,
    seed: u64,
) -> somm::Result<Dataset> {
    let minority: Vec<usize> = (0..train.n_rows())
        .filter(|&i| train.labels()[i] == minority_label)
        .collect();
    let n_majority = train.n_rows() - minority.len();
    let target = minority_target(level, n_majority, minority.len());
    if target > minority.len() {
        return Err(Error::InvalidInput(format!(
            "imbalance level needs {target} minority rows but only {} are available",
            minority.len()
        )));
    }
    let mut keep = minority.clone();
    keep.shuffle(&mut stream_rng(seed, 0));
    keep.truncate(target);
    let mut rows: Vec<usize> = (0..train.n_rows())
        .filter(|&i| train.labels()[i] != minority_label)
        .chain(keep)
        .collect();
    rows.sort_unstable();
    Ok(train.select(&rows))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerParams {
    pub max_attempts_factor: usize,
    pub seed: u64,
}

/// Brings every class up to the size of the largest one with the given
/// sampler. Classes are processed in ascending id, each with seed
/// `child_seed(seed, class)`; original rows come first.
pub fn balance(
    train: &Dataset,
    sampler: &SamplerSetup,
    params: SamplerParams,
) -> somm::Result<Dataset> {
    match sampler.kind {
        SamplerKind::None => Ok(train.clone()),
        SamplerKind::Somm => somm_multiclass(
            train,
            &SommConfig {
                k: sampler.k,
                n_synthetic: SyntheticCount::Auto,
                max_attempts_factor: params.max_attempts_factor,
                seed: params.seed,
            },
        ),
        SamplerKind::Smote | SamplerKind::Random => {
            let counts = train.class_counts();
            let target = counts.iter().copied().max().unwrap_or(0);
            let mut out = train.clone();
            for (class, &count) in counts.iter().enumerate() {
                if count == 0 || count == target {
                    continue;
                }
                let n = target - count;
                let seed = child_seed(params.seed, class as u64);
                let synthetic = if sampler.kind == SamplerKind::Smote {
                    let cfg = SmoteConfig {
                        k: sampler.k,
                        n_synthetic: SyntheticCount::Exact(n),
                        seed,
                    };
                    smote_oversample(train, class, &cfg)
                } else {
                    random_oversample(train, class, n, seed)
                }
                .map_err(|e| Error::Class {
                    class,
                    source: Box::new(e),
                })?;
                out = out.append(synthetic.synthetic.view(), class)?;
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use ndarray::Array2;

    use super::*;

    fn two_class(n0: usize, n1: usize) -> Dataset {
        let n = n0 + n1;
        let x = Array2::from_shape_fn((n, 2), |(i, j)| (i * 2 + j) as f64);
        let labels = (0..n).map(|i| usize::from(i >= n0)).collect();
        Dataset::new(x, labels).unwrap()
    }

    #[test]
    fn split_is_proportional_and_exhaustive() {
        let d = two_class(100, 20);
        let (train, test) = stratified_split(&d, 0.75, 1).unwrap();
        assert_eq!(train.class_counts(), vec![75, 15]);
        assert_eq!(test.class_counts(), vec![25, 5]);
        let mut all: Vec<f64> = train
            .features()
            .column(0)
            .iter()
            .chain(test.features().column(0))
            .copied()
            .collect();
        all.sort_by(f64::total_cmp);
        let mut orig = d.features().column(0).to_vec();
        orig.sort_by(f64::total_cmp);
        assert_eq!(all, orig);
        assert_eq!(
            (train.clone(), test.clone()),
            stratified_split(&d, 0.75, 1).unwrap()
        );
        assert_ne!(train, stratified_split(&d, 0.75, 2).unwrap().0);
    }

    #[test]
    fn split_keeps_a_row_on_each_side() {
        let (train, test) = stratified_split(&two_class(10, 2), 0.9, 0).unwrap();
        assert_eq!(train.class_counts(), vec![9, 1]);
        assert_eq!(test.class_counts(), vec![1, 1]);
        assert!(stratified_split(&two_class(10, 1), 0.75, 0).is_err());
    }

    #[test]
    fn targets() {
        assert_eq!(
            minority_target(ImbalanceLevel::Fraction(0.05), 950, 200),
            50
        );
        assert_eq!(minority_target(ImbalanceLevel::Fraction(0.01), 500, 200), 8);
        assert_eq!(minority_target(ImbalanceLevel::Fraction(0.05), 10, 200), 2);
        assert_eq!(minority_target(ImbalanceLevel::Absolute(6), 500, 200), 6);
        assert_eq!(minority_target(ImbalanceLevel::AsIs, 500, 17), 17);
    }

    #[test]
    fn downsampling() {
        let d = two_class(950, 100);
        let out = downsample_minority(&d, 1, ImbalanceLevel::Fraction(0.05), 3).unwrap();
        assert_eq!(out.class_counts(), vec![950, 50]);
        let out = downsample_minority(&d, 1, ImbalanceLevel::Absolute(6), 3).unwrap();
        assert_eq!(out.class_counts(), vec![950, 6]);
        assert!(
            downsample_minority(&two_class(950, 10), 1, ImbalanceLevel::Fraction(0.05), 3).is_err()
        );
        let same = downsample_minority(&d, 1, ImbalanceLevel::AsIs, 3).unwrap();
        assert_eq!(same, d);
    }

    #[test]
    fn balancing_with_each_sampler() {
        let d = two_class(40, 10);
        for (kind, k) in [
            (SamplerKind::None, 0),
            (SamplerKind::Somm, 5),
            (SamplerKind::Smote, 3),
            (SamplerKind::Random, 0),
        ] {
            let setup = SamplerSetup {
                label: kind.name().into(),
                kind,
                k,
            };
            let out = balance(
                &d,
                &setup,
                SamplerParams {
                    max_attempts_factor: 50,
                    seed: 1,
                },
            )
            .unwrap();
            let expected = if kind == SamplerKind::None {
                vec![40, 10]
            } else {
                vec![40, 40]
            };
            assert_eq!(out.class_counts(), expected, "{kind}");
        }
    }
}
