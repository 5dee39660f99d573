use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::neighbors::nearest_rows;

/// Majority vote among the `k` nearest stored training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Knn {
    pub train: Array2<f64>,
    pub labels: Vec<usize>,
    pub n_classes: usize,
    pub k: usize,
}

impl Knn {
    pub fn fit(train: Array2<f64>, labels: Vec<usize>, n_classes: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("knn k must be at least 1"));
        }
        Ok(Self {
            train,
            labels,
            n_classes,
            k,
        })
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Vec<usize> {
        x.rows()
            .into_iter()
            .map(|q| {
                let mut votes = vec![0usize; self.n_classes];
                for (i, _) in nearest_rows(q, self.train.view(), self.k, None) {
                    votes[self.labels[i]] += 1;
                }
                super::argmax(votes.into_iter().enumerate().map(|(c, v)| (c, v as f64)))
            })
            .collect()
    }
}
