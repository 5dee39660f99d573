//! Exact Euclidean k-nearest-neighbor search by linear scan.
//!
//! Neighbors are ordered by ascending distance, with equal distances ordered
//! by ascending row index, so results do not depend on the platform or on
//! the sort algorithm.

use std::cmp::Ordering;

use ndarray::{ArrayView1, ArrayView2};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Euclidean distance between two equal-length vectors.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(distance(a.iter().copied(), b.iter().copied()))
}

#[inline]
pub(crate) fn distance(a: impl Iterator<Item = f64>, b: impl Iterator<Item = f64>) -> f64 {
    a.zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Orders `(row, distance)` pairs by distance, then row.
#[inline]
pub(crate) fn by_distance_then_index(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))
}

/// The `k` rows of `rows` closest to `query`, as `(row, distance)` pairs in
/// ascending order. `exclude` removes one row from consideration.
pub fn nearest_rows(
    query: ArrayView1<'_, f64>,
    rows: ArrayView2<'_, f64>,
    k: usize,
    exclude: Option<usize>,
) -> Vec<(usize, f64)> {
    let mut all: Vec<(usize, f64)> = rows
        .rows()
        .into_iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != exclude)
        .map(|(i, r)| (i, distance(query.iter().copied(), r.iter().copied())))
        .collect();
    let k = k.min(all.len());
    if k == 0 {
        return Vec::new();
    }
    if k < all.len() {
        all.select_nth_unstable_by(k - 1, by_distance_then_index);
        all.truncate(k);
    }
    all.sort_unstable_by(by_distance_then_index);
    all
}

/// The ordered neighborhood of one query point.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborSet {
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
    pub is_minority: Vec<bool>,
    /// Position of the first minority neighbor, if any.
    pub index_b: Option<usize>,
}

impl NeighborSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// The `k` training rows nearest to `query`, flagged against `minority_label`.
pub fn k_nearest(
    query: &[f64],
    train_norm: &Dataset,
    minority_label: usize,
    k: usize,
) -> Result<NeighborSet> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k > train_norm.n_rows() {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the {} training rows",
            train_norm.n_rows()
        )));
    }
    if query.len() != train_norm.n_features() {
        return Err(Error::invalid(format!(
            "query has {} features, training data has {}",
            query.len(),
            train_norm.n_features()
        )));
    }
    let found = nearest_rows(
        ArrayView1::from(query),
        train_norm.features().view(),
        k,
        None,
    );
    let labels = train_norm.labels();
    let is_minority: Vec<bool> = found
        .iter()
        .map(|&(i, _)| labels[i] == minority_label)
        .collect();
    Ok(NeighborSet {
        index_b: is_minority.iter().position(|&m| m),
        indices: found.iter().map(|&(i, _)| i).collect(),
        distances: found.iter().map(|&(_, d)| d).collect(),
        is_minority,
    })
}
