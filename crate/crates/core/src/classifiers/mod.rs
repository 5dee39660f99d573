//! Small classifiers used to score resampled training data.
//!
//! Every model min-max normalizes its inputs with bounds taken from the
//! training rows, and every prediction tie resolves to the lowest class id.

mod gnb;
mod knn;
pub mod logreg;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use ndarray::ArrayView2;

use crate::data::{Dataset, NormalizationParams};
use crate::error::{Error, Result};

pub use gnb::GaussianNb;
pub use knn::Knn;
pub use logreg::LogisticRegression;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Knn,
    LogReg,
    Gnb,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [
        ClassifierKind::Knn,
        ClassifierKind::LogReg,
        ClassifierKind::Gnb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Knn => "knn",
            ClassifierKind::LogReg => "logreg",
            ClassifierKind::Gnb => "gnb",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassifierKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown classifier {s:?}; expected knn, logreg or gnb"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub knn_k: usize,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            knn_k: 5,
            epochs: 500,
            learning_rate: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Knn(Knn),
    LogReg(LogisticRegression),
    Gnb(GaussianNb),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub kind: ClassifierKind,
    pub scaler: NormalizationParams,
    pub n_classes: usize,
    pub params: ModelParams,
}

pub fn fit(train: &Dataset, kind: ClassifierKind, hyper: &Hyperparams) -> Result<TrainedModel> {
    let present = train.class_counts().iter().filter(|&&c| c > 0).count();
    if present < 2 {
        return Err(Error::invalid(format!(
            "training data needs at least 2 classes, found {present}"
        )));
    }
    let scaler = NormalizationParams::fit(train.features().view())?;
    let x = scaler.transform(train.features().view())?;
    let y = train.labels();
    let n_classes = train.n_classes();
    let params = match kind {
        ClassifierKind::Knn => ModelParams::Knn(Knn::fit(x, y.to_vec(), n_classes, hyper.knn_k)?),
        ClassifierKind::LogReg => ModelParams::LogReg(LogisticRegression::fit(
            x.view(),
            y,
            n_classes,
            hyper.epochs,
            hyper.learning_rate,
        )),
        ClassifierKind::Gnb => ModelParams::Gnb(GaussianNb::fit(x.view(), y, n_classes)),
    };
    Ok(TrainedModel {
        kind,
        scaler,
        n_classes,
        params,
    })
}

pub fn predict(model: &TrainedModel, features: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
    if features.ncols() != model.scaler.n_features() {
        return Err(Error::invalid(format!(
            "model expects {} features, got {}",
            model.scaler.n_features(),
            features.ncols()
        )));
    }
    let x = model.scaler.transform(features)?;
    Ok(match &model.params {
        ModelParams::Knn(m) => m.predict(x.view()),
        ModelParams::LogReg(m) => m.predict(x.view()),
        ModelParams::Gnb(m) => m.predict(x.view()),
    })
}

/// Index of the largest score; the first one wins ties.
pub(crate) fn argmax(scores: impl IntoIterator<Item = (usize, f64)>) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for (class, s) in scores {
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((class, s)),
        }
    }
    best.map_or(0, |(c, _)| c)
}

#[cfg(test)]
mod tests {
    use ndarray::{array, Array2};
    use rand_distr::{Distribution, Normal};

    use super::*;
    use crate::rng::stream_rng;

    fn blobs(n: usize, seed: u64) -> Dataset {
        let noise = Normal::new(0.0, 0.5).unwrap();
        let mut rng = stream_rng(seed, 0);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for class in 0..2 {
            let c = if class == 0 { -1.5 } else { 1.5 };
            for _ in 0..n {
                rows.push(c + noise.sample(&mut rng));
                rows.push(c + noise.sample(&mut rng));
                labels.push(class);
            }
        }
        Dataset::new(Array2::from_shape_vec((2 * n, 2), rows).unwrap(), labels).unwrap()
    }

    #[test]
    fn separated_blobs_are_learned() {
        let train = blobs(100, 1);
        let test = blobs(100, 2);
        for kind in ClassifierKind::ALL {
            let model = fit(&train, kind, &Hyperparams::default()).unwrap();
            let pred = predict(&model, test.features().view()).unwrap();
            let correct = pred
                .iter()
                .zip(test.labels())
                .filter(|(p, t)| p == t)
                .count();
            let accuracy = correct as f64 / test.n_rows() as f64;
            assert!(accuracy >= 0.98, "{kind}: {accuracy}");
        }
    }

    #[test]
    fn knn_memorizes() {
        let train = blobs(20, 3);
        let model = fit(
            &train,
            ClassifierKind::Knn,
            &Hyperparams {
                knn_k: 1,
                ..Hyperparams::default()
            },
        )
        .unwrap();
        assert_eq!(
            predict(&model, train.features().view()).unwrap(),
            train.labels()
        );
    }

    #[test]
    fn single_class_and_width_errors() {
        let one = Dataset::new(array![[0.0], [1.0]], vec![1, 1]).unwrap();
        for kind in ClassifierKind::ALL {
            assert!(fit(&one, kind, &Hyperparams::default()).is_err());
        }
        let model = fit(&blobs(5, 0), ClassifierKind::Gnb, &Hyperparams::default()).unwrap();
        assert!(predict(&model, array![[0.0, 1.0, 2.0]].view()).is_err());
    }

    #[test]
    fn gnb_midpoint_tie_goes_to_class_zero() {
        let train = Dataset::new(array![[0.0], [0.25], [0.75], [1.0]], vec![0, 0, 1, 1]).unwrap();
        let model = fit(&train, ClassifierKind::Gnb, &Hyperparams::default()).unwrap();
        assert_eq!(predict(&model, array![[0.5]].view()).unwrap(), vec![0]);
        assert_eq!(predict(&model, array![[0.6]].view()).unwrap(), vec![1]);
    }

    #[test]
    fn gnb_uninformative_features_follow_priors() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for rep in 0..10 {
            for v in [0.0, 1.0, 2.0] {
                rows.push(v);
                labels.push(usize::from(rep >= 3));
            }
        }
        let train = Dataset::new(Array2::from_shape_vec((30, 1), rows).unwrap(), labels).unwrap();
        let model = fit(&train, ClassifierKind::Gnb, &Hyperparams::default()).unwrap();
        assert_eq!(
            predict(&model, array![[0.0], [1.5], [2.0]].view()).unwrap(),
            vec![1, 1, 1]
        );
    }

    #[test]
    fn row_order_does_not_change_predictions() {
        let train = blobs(40, 4);
        let reversed: Vec<usize> = (0..train.n_rows()).rev().collect();
        let shuffled = train.select(&reversed);
        let probe = blobs(50, 5);
        for kind in ClassifierKind::ALL {
            let a = fit(&train, kind, &Hyperparams::default()).unwrap();
            let b = fit(&shuffled, kind, &Hyperparams::default()).unwrap();
            assert_eq!(
                predict(&a, probe.features().view()).unwrap(),
                predict(&b, probe.features().view()).unwrap(),
                "{kind}"
            );
            if let (ModelParams::LogReg(x), ModelParams::LogReg(y)) = (&a.params, &b.params) {
                for (u, v) in x.models.iter().zip(&y.models) {
                    assert!((u.bias - v.bias).abs() < 1e-6);
                    for (p, q) in u.weights.iter().zip(&v.weights) {
                        assert!((p - q).abs() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn multiclass_models_predict_every_class() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (class, c) in [(0usize, 0.0), (1, 5.0), (2, 10.0)] {
            for i in 0..20 {
                rows.extend([c + (i % 4) as f64 * 0.2, (i / 4) as f64 * 0.2]);
                labels.push(class);
            }
        }
        let train = Dataset::new(Array2::from_shape_vec((60, 2), rows).unwrap(), labels).unwrap();
        for kind in ClassifierKind::ALL {
            let model = fit(&train, kind, &Hyperparams::default()).unwrap();
            let pred = predict(&model, array![[0.3, 0.4], [5.3, 0.4], [10.3, 0.4]].view()).unwrap();
            assert_eq!(pred, vec![0, 1, 2], "{kind}");
        }
    }

    #[test]
    fn argmax_prefers_first() {
        assert_eq!(argmax([(0, 1.0), (1, 1.0), (2, 0.5)]), 0);
        assert_eq!(argmax([(0, 1.0), (1, 2.0)]), 1);
    }
}
