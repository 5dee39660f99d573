//! Classification metrics for imbalanced data.

use crate::error::{Error, Result};

/// Counts indexed `[true class][predicted class]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let c = counts.len();
        if c == 0 || counts.iter().any(|r| r.len() != c) {
            return Err(Error::invalid(
                "confusion matrix must be square and non-empty",
            ));
        }
        Ok(Self { counts })
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth][predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Per-class recall (true positive rate of each class).
    pub fn recalls(&self) -> Result<Vec<f64>> {
        self.counts
            .iter()
            .enumerate()
            .map(|(c, row)| {
                let n: u64 = row.iter().sum();
                if n == 0 {
                    Err(Error::UndefinedMetric(format!(
                        "class {c} has no true instances"
                    )))
                } else {
                    Ok(row[c] as f64 / n as f64)
                }
            })
            .collect()
    }
}

pub fn confusion(
    true_labels: &[usize],
    pred_labels: &[usize],
    n_classes: usize,
) -> Result<ConfusionMatrix> {
    if true_labels.len() != pred_labels.len() {
        return Err(Error::invalid(format!(
            "{} true labels but {} predictions",
            true_labels.len(),
            pred_labels.len()
        )));
    }
    if n_classes == 0 {
        return Err(Error::invalid("confusion matrix needs at least one class"));
    }
    let mut counts = vec![vec![0u64; n_classes]; n_classes];
    for (&t, &p) in true_labels.iter().zip(pred_labels) {
        if t >= n_classes || p >= n_classes {
            return Err(Error::invalid(format!(
                "label pair ({t}, {p}) outside 0..{n_classes}"
            )));
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// `sqrt(TPR * TNR)` of a two-class confusion matrix.
pub fn g_mean(cm: &ConfusionMatrix) -> Result<f64> {
    if cm.n_classes() != 2 {
        return Err(Error::invalid(format!(
            "g-mean needs a binary confusion matrix, got {} classes",
            cm.n_classes()
        )));
    }
    let r = cm.recalls()?;
    Ok((r[0] * r[1]).sqrt())
}

/// Geometric mean of the per-class recalls.
pub fn mg(cm: &ConfusionMatrix) -> Result<f64> {
    let r = cm.recalls()?;
    let product: f64 = r.iter().product();
    Ok(product.powf(1.0 / r.len() as f64))
}

/// Class sizes in descending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDistribution {
    counts: Vec<u64>,
}

impl ClassDistribution {
    pub fn new(mut counts: Vec<u64>) -> Result<Self> {
        if counts.contains(&0) {
            return Err(Error::invalid("class counts must be positive"));
        }
        counts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// Sum over class pairs `i < j` (larger first) of `N_i / N_j - 1`.
pub fn imbalance_ratio(dist: &ClassDistribution) -> f64 {
    let n = dist.counts();
    let mut ir = 0.0;
    for (i, &ni) in n.iter().enumerate() {
        for &nj in &n[i + 1..] {
            ir += ni as f64 / nj as f64 - 1.0;
        }
    }
    ir
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;

    fn binary(tp: u64, fn_: u64, fp: u64, tn: u64) -> ConfusionMatrix {
        ConfusionMatrix::from_counts(vec![vec![tp, fn_], vec![fp, tn]]).unwrap()
    }

    #[test]
    fn confusion_shapes() {
        let cm = confusion(&[0, 1, 2, 1], &[0, 1, 2, 1], 3).unwrap();
        assert_eq!(cm.counts(), &[vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 1]]);
        let cm = confusion(&[0, 1, 2, 1], &[1, 1, 1, 1], 3).unwrap();
        assert!(cm.counts().iter().all(|r| r[0] == 0 && r[2] == 0));
        assert_eq!(cm.total(), 4);
        assert!(confusion(&[0, 3], &[0, 1], 3).is_err());
        assert!(confusion(&[0], &[0, 1], 3).is_err());
    }

    #[test]
    fn g_mean_examples() {
        assert_eq!(g_mean(&binary(10, 0, 0, 5)).unwrap(), 1.0);
        assert_abs_diff_eq!(
            g_mean(&binary(8, 2, 5, 5)).unwrap(),
            0.4f64.sqrt(),
            epsilon = 1e-15
        );
        assert_eq!(g_mean(&binary(10, 0, 5, 0)).unwrap(), 0.0);
        assert!(matches!(
            g_mean(&binary(10, 0, 0, 0)),
            Err(Error::UndefinedMetric(_))
        ));
        let three = ConfusionMatrix::from_counts(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])
            .unwrap();
        assert!(g_mean(&three).is_err());
    }

    #[test]
    fn mg_examples() {
        let perfect =
            ConfusionMatrix::from_counts(vec![vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 1]])
                .unwrap();
        assert_eq!(mg(&perfect).unwrap(), 1.0);
        let dead = ConfusionMatrix::from_counts(vec![vec![9, 1, 0], vec![6, 4, 0], vec![3, 2, 0]])
            .unwrap();
        assert_eq!(dead.recalls().unwrap(), vec![0.9, 0.4, 0.0]);
        assert_eq!(mg(&dead).unwrap(), 0.0);
    }

    #[test]
    fn imbalance_ratio_examples() {
        let ir = imbalance_ratio(&ClassDistribution::new(vec![195, 431, 220]).unwrap());
        assert!((ir - 2.30).abs() < 0.01);
        assert_eq!(
            imbalance_ratio(&ClassDistribution::new(vec![7, 7, 7]).unwrap()),
            0.0
        );
        assert_eq!(
            imbalance_ratio(&ClassDistribution::new(vec![1, 100]).unwrap()),
            99.0
        );
        assert!(ClassDistribution::new(vec![3, 0]).is_err());
    }

    proptest! {
        #[test]
        fn mg_equals_g_mean_for_two_classes(c in prop::collection::vec(0u64..50, 4)) {
            let cm = binary(c[0] + 1, c[1], c[2], c[3] + 1);
            prop_assert!((mg(&cm).unwrap() - g_mean(&cm).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn relabeling_preserves_mg(c in prop::collection::vec(1u64..20, 9), perm in Just([2usize, 0, 1])) {
            let counts: Vec<Vec<u64>> = c.chunks(3).map(<[u64]>::to_vec).collect();
            let permuted: Vec<Vec<u64>> = (0..3)
                .map(|i| (0..3).map(|j| counts[perm[i]][perm[j]]).collect())
                .collect();
            let a = mg(&ConfusionMatrix::from_counts(counts).unwrap()).unwrap();
            let b = mg(&ConfusionMatrix::from_counts(permuted).unwrap()).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn imbalance_ratio_is_scale_invariant(c in prop::collection::vec(1u64..1000, 2..6), s in 1u64..50) {
            let base = imbalance_ratio(&ClassDistribution::new(c.clone()).unwrap());
            let scaled = imbalance_ratio(&ClassDistribution::new(c.iter().map(|x| x * s).collect()).unwrap());
            prop_assert!((base - scaled).abs() <= 1e-9 * (1.0 + base));
        }
    }
}
