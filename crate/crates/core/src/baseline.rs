//! Baseline over-samplers: random duplication and SMOTE.
//!
//! Both work on minority rows in the original feature space and return the
//! same [`SommOutput`] shape as the SOMM sampler. Neither looks at majority
//! rows.

use ndarray::{Array2, ArrayView2};
use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::neighbors::nearest_rows;
use crate::rng::stream_rng;
use crate::sampler::{SommOutput, SyntheticCount};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoteConfig {
    /// Minority neighbors considered per base row.
    pub k: usize,
    pub n_synthetic: SyntheticCount,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        Self {
            k: 5,
            n_synthetic: SyntheticCount::Auto,
            seed: 0,
        }
    }
}

fn minority_rows(train: &Dataset, minority_label: usize) -> Result<Array2<f64>> {
    let idx: Vec<usize> = (0..train.n_rows())
        .filter(|&i| train.labels()[i] == minority_label)
        .collect();
    if idx.is_empty() {
        return Err(Error::invalid(format!(
            "minority class {minority_label} is empty"
        )));
    }
    Ok(train.select(&idx).features().to_owned())
}

fn resolve_count(train: &Dataset, minority_label: usize, count: SyntheticCount) -> Result<usize> {
    match count {
        SyntheticCount::Exact(n) => Ok(n),
        SyntheticCount::Auto => {
            let minority = train.count_of(minority_label);
            let majority = train.n_rows() - minority;
            majority.checked_sub(minority).ok_or_else(|| {
                Error::invalid(format!(
                    "class {minority_label} has {minority} rows, more than the {majority} majority rows"
                ))
            })
        }
    }
}

/// `n` minority rows drawn uniformly with replacement.
pub fn random_oversample(
    train: &Dataset,
    minority_label: usize,
    n: usize,
    seed: u64,
) -> Result<SommOutput> {
    let minority = minority_rows(train, minority_label)?;
    let mut rng = stream_rng(seed, 0);
    let picks: Vec<usize> = (0..n)
        .map(|_| rng.random_range(0..minority.nrows()))
        .collect();
    Ok(SommOutput {
        synthetic: minority.select(ndarray::Axis(0), &picks),
        assigned_label: minority_label,
        attempts_used: n,
        removed_count: 0,
    })
}

/// SMOTE: each synthetic row interpolates between a minority row and one of
/// its `k` nearest minority neighbors, `x + u * (neighbor - x)` with
/// `u ~ U[0, 1)`. Base rows are taken round-robin; synthetic `i` draws its
/// neighbor and `u` from stream `i` of the seed.
pub fn smote_oversample(
    train: &Dataset,
    minority_label: usize,
    config: &SmoteConfig,
) -> Result<SommOutput> {
    if config.k == 0 {
        return Err(Error::invalid("SMOTE k must be at least 1"));
    }
    let minority = minority_rows(train, minority_label)?;
    if minority.nrows() <= config.k {
        return Err(Error::invalid(format!(
            "SMOTE with k = {} needs more than {} minority rows, found {}",
            config.k,
            config.k,
            minority.nrows()
        )));
    }
    let n = resolve_count(train, minority_label, config.n_synthetic)?;
    let neighbors = minority_neighbors(minority.view(), config.k);
    let width = minority.ncols();
    let mut synthetic = Array2::zeros((n, width));
    for (i, mut out) in synthetic.rows_mut().into_iter().enumerate() {
        let base = i % minority.nrows();
        let mut rng = stream_rng(config.seed, i as u64);
        let neighbor = neighbors[base][rng.random_range(0..config.k)];
        let u: f64 = rng.random();
        let x = minority.row(base);
        let y = minority.row(neighbor);
        for f in 0..width {
            out[f] = x[f] + u * (y[f] - x[f]);
        }
    }
    Ok(SommOutput {
        synthetic,
        assigned_label: minority_label,
        attempts_used: n,
        removed_count: 0,
    })
}

/// For every row, the indices of its `k` nearest other rows.
pub fn minority_neighbors(rows: ArrayView2<'_, f64>, k: usize) -> Vec<Vec<usize>> {
    (0..rows.nrows())
        .map(|i| {
            nearest_rows(rows.row(i), rows, k, Some(i))
                .into_iter()
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}
