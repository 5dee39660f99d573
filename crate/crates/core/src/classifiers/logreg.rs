//! Logistic regression by full-batch gradient descent on the mean
//! cross-entropy. Two classes share one model (the higher id is the positive
//! class); more classes get one-vs-rest models.

use ndarray::{Array1, ArrayView1, ArrayView2};

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryModel {
    pub weights: Array1<f64>,
    pub bias: f64,
}

impl BinaryModel {
    pub fn score(&self, row: ArrayView1<'_, f64>) -> f64 {
        self.weights.dot(&row) + self.bias
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegression {
    /// Class ids present at training time, ascending.
    pub classes: Vec<usize>,
    /// One model for two classes, otherwise one per entry of `classes`.
    pub models: Vec<BinaryModel>,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean cross-entropy of `model` on targets in `{0, 1}`.
pub fn loss(model: &BinaryModel, x: ArrayView2<'_, f64>, targets: &[f64]) -> f64 {
    let total: f64 = x
        .rows()
        .into_iter()
        .zip(targets)
        .map(|(row, &t)| {
            let z = model.score(row);
            softplus(z) - t * z
        })
        .sum();
    total / targets.len() as f64
}

/// Gradient of [`loss`] with respect to `(weights, bias)`.
pub fn gradient(
    model: &BinaryModel,
    x: ArrayView2<'_, f64>,
    targets: &[f64],
) -> (Array1<f64>, f64) {
    let n = targets.len() as f64;
    let mut gw = Array1::zeros(x.ncols());
    let mut gb = 0.0;
    for (row, &t) in x.rows().into_iter().zip(targets) {
        let err = sigmoid(model.score(row)) - t;
        gw.scaled_add(err, &row);
        gb += err;
    }
    (gw / n, gb / n)
}

pub fn train_binary(
    x: ArrayView2<'_, f64>,
    targets: &[f64],
    epochs: usize,
    learning_rate: f64,
) -> BinaryModel {
    let mut model = BinaryModel {
        weights: Array1::zeros(x.ncols()),
        bias: 0.0,
    };
    for _ in 0..epochs {
        let (gw, gb) = gradient(&model, x, targets);
        model.weights.scaled_add(-learning_rate, &gw);
        model.bias -= learning_rate * gb;
    }
    model
}

impl LogisticRegression {
    pub fn fit(
        x: ArrayView2<'_, f64>,
        y: &[usize],
        n_classes: usize,
        epochs: usize,
        learning_rate: f64,
    ) -> Self {
        let classes: Vec<usize> = (0..n_classes).filter(|c| y.contains(c)).collect();
        let targets_for =
            |c: usize| -> Vec<f64> { y.iter().map(|&l| if l == c { 1.0 } else { 0.0 }).collect() };
        let models = if classes.len() == 2 {
            vec![train_binary(
                x,
                &targets_for(classes[1]),
                epochs,
                learning_rate,
            )]
        } else {
            classes
                .iter()
                .map(|&c| train_binary(x, &targets_for(c), epochs, learning_rate))
                .collect()
        };
        Self { classes, models }
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Vec<usize> {
        x.rows()
            .into_iter()
            .map(|row| {
                if let [model] = self.models.as_slice() {
                    // Probability exactly 0.5 goes to the lower id.
                    if sigmoid(model.score(row)) > 0.5 {
                        self.classes[1]
                    } else {
                        self.classes[0]
                    }
                } else {
                    let scores = self
                        .classes
                        .iter()
                        .zip(&self.models)
                        .map(|(&c, m)| (c, m.score(row)));
                    super::argmax(scores)
                }
            })
            .collect()
    }
}
