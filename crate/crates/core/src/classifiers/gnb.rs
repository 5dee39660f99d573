use ndarray::ArrayView2;

/// Gaussian naive Bayes with a per-feature variance floor of
/// `1e-9 + 1e-6 * (variance of the feature over all rows)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNb {
    /// `None` for classes absent from the training data.
    pub classes: Vec<Option<ClassStats>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub log_prior: f64,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

fn mean_and_variance<'a>(values: impl Iterator<Item = &'a f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

impl GaussianNb {
    pub fn fit(x: ArrayView2<'_, f64>, y: &[usize], n_classes: usize) -> Self {
        let n = y.len() as f64;
        let floors: Vec<f64> = x
            .columns()
            .into_iter()
            .map(|c| 1e-9 + 1e-6 * mean_and_variance(c.iter()).1)
            .collect();
        let classes = (0..n_classes)
            .map(|class| {
                let rows: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
                if rows.is_empty() {
                    return None;
                }
                let (means, variances) = (0..x.ncols())
                    .map(|f| {
                        let col = x.column(f);
                        let vals: Vec<f64> = rows.iter().map(|&i| col[i]).collect();
                        let (m, v) = mean_and_variance(vals.iter());
                        (m, v.max(floors[f]))
                    })
                    .unzip();
                Some(ClassStats {
                    log_prior: (rows.len() as f64 / n).ln(),
                    means,
                    variances,
                })
            })
            .collect();
        Self { classes }
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Vec<usize> {
        x.rows()
            .into_iter()
            .map(|row| {
                let scores = self.classes.iter().enumerate().filter_map(|(c, stats)| {
                    let s = stats.as_ref()?;
                    let ll: f64 = row
                        .iter()
                        .zip(s.means.iter().zip(&s.variances))
                        .map(|(&v, (&m, &var))| {
                            -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + (v - m).powi(2) / var)
                        })
                        .sum();
                    Some((c, s.log_prior + ll))
                });
                super::argmax(scores)
            })
            .collect()
    }
}
