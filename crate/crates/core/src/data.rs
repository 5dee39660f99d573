//! Dataset representation, min-max normalization and CSV ingestion.
//!
//! On disk a dataset is a comma-separated file with a header row, numeric
//! feature columns and the class label in the last column. Labels are
//! re-encoded as dense ids `0..C` on ingestion; the original label strings are
//! kept in [`Dataset::class_names`].

use std::collections::BTreeSet;
use std::path::Path;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};

/// A feature matrix (rows are instances) with one integer class id per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<usize>,
    feature_names: Option<Vec<String>>,
    class_names: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset, checking that the label count matches the row count,
    /// that there is at least one feature column and that every value is
    /// finite. Subsets produced by [`split_by_class`] may have fewer than two
    /// rows; the two-row minimum is enforced where data enters the crate
    /// ([`read_csv`]) and by the operations that need it.
    pub fn new(features: Array2<f64>, labels: Vec<usize>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::invalid(format!(
                "{} feature rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        if features.ncols() == 0 {
            return Err(Error::invalid("dataset has no feature columns"));
        }
        if let Some(((row, col), v)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value {v} at row {row}, column {col}"
            )));
        }
        Ok(Self {
            features,
            labels,
            feature_names: None,
            class_names: None,
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features() {
            return Err(Error::invalid(format!(
                "{} feature names for {} columns",
                names.len(),
                self.n_features()
            )));
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Result<Self> {
        if let Some(&max) = self.labels.iter().max() {
            if max >= names.len() {
                return Err(Error::invalid(format!(
                    "label {max} has no entry among {} class names",
                    names.len()
                )));
            }
        }
        self.class_names = Some(names);
        Ok(self)
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn class_names(&self) -> Option<&[String]> {
        self.class_names.as_deref()
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    /// Number of classes implied by the labels and class names: one more than
    /// the largest id in use, or the number of names if that is larger.
    pub fn n_classes(&self) -> usize {
        let from_labels = self.labels.iter().max().map_or(0, |&m| m + 1);
        let from_names = self.class_names.as_ref().map_or(0, Vec::len);
        from_labels.max(from_names)
    }

    /// Per-class row counts indexed by class id.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    pub fn count_of(&self, label: usize) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// The rows at `indices`, in the given order, keeping names.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    /// Appends `rows` (all labelled `label`) below the existing rows.
    pub fn append(&self, rows: ArrayView2<'_, f64>, label: usize) -> Result<Dataset> {
        if rows.ncols() != self.n_features() {
            return Err(Error::invalid(format!(
                "cannot append {}-column rows to a {}-column dataset",
                rows.ncols(),
                self.n_features()
            )));
        }
        let features = ndarray::concatenate(Axis(0), &[self.features.view(), rows])
            .expect("column counts checked above");
        let mut labels = self.labels.clone();
        labels.extend(std::iter::repeat_n(label, rows.nrows()));
        let mut out = Dataset::new(features, labels)?;
        out.feature_names = self.feature_names.clone();
        out.class_names = self.class_names.clone();
        Ok(out)
    }

    /// Same labels and names with a replacement feature matrix.
    pub(crate) fn with_features(&self, features: Array2<f64>) -> Result<Dataset> {
        let mut out = Dataset::new(features, self.labels.clone())?;
        out.feature_names = self.feature_names.clone();
        out.class_names = self.class_names.clone();
        Ok(out)
    }
}

/// Column-wise minimum and maximum recorded by [`normalize`].
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationParams {
    pub min_per_feature: Vec<f64>,
    pub max_per_feature: Vec<f64>,
    pub constant_feature_mask: Vec<bool>,
}

impl NormalizationParams {
    /// Column-wise bounds of a non-empty matrix.
    pub fn fit(features: ArrayView2<'_, f64>) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(Error::invalid("cannot normalize an empty dataset"));
        }
        let (min, max): (Vec<f64>, Vec<f64>) = features
            .columns()
            .into_iter()
            .map(|c| {
                c.iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                        (lo.min(v), hi.max(v))
                    })
            })
            .unzip();
        let constant_feature_mask = min.iter().zip(&max).map(|(lo, hi)| lo == hi).collect();
        Ok(Self {
            min_per_feature: min,
            max_per_feature: max,
            constant_feature_mask,
        })
    }

    pub fn n_features(&self) -> usize {
        self.min_per_feature.len()
    }

    fn check_width(&self, ncols: usize) -> Result<()> {
        if ncols != self.n_features() {
            return Err(Error::invalid(format!(
                "matrix has {ncols} columns, normalization has {}",
                self.n_features()
            )));
        }
        Ok(())
    }

    /// `(x - min) / (max - min)` per column; constant columns map to 0.
    /// Values outside the fitted range land outside `[0, 1]`.
    pub fn transform(&self, features: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check_width(features.ncols())?;
        let mut out = features.to_owned();
        for (f, mut col) in out.columns_mut().into_iter().enumerate() {
            if self.constant_feature_mask[f] {
                col.fill(0.0);
            } else {
                let lo = self.min_per_feature[f];
                let range = self.max_per_feature[f] - lo;
                col.mapv_inplace(|v| (v - lo) / range);
            }
        }
        Ok(out)
    }

    /// Inverse of [`transform`](Self::transform). Constant columns are
    /// restored to their stored value whatever the input says.
    pub fn inverse_transform(&self, normalized: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check_width(normalized.ncols())?;
        if normalized.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite value in normalized matrix"));
        }
        let mut out = normalized.to_owned();
        for (f, mut col) in out.columns_mut().into_iter().enumerate() {
            let lo = self.min_per_feature[f];
            if self.constant_feature_mask[f] {
                col.fill(lo);
            } else {
                let range = self.max_per_feature[f] - lo;
                col.mapv_inplace(|v| v * range + lo);
            }
        }
        Ok(out)
    }
}

/// Min-max normalizes every column of `data` into `[0, 1]`.
pub fn normalize(data: &Dataset) -> Result<(Dataset, NormalizationParams)> {
    let params = NormalizationParams::fit(data.features().view())?;
    let features = params.transform(data.features().view())?;
    Ok((data.with_features(features)?, params))
}

/// Maps normalized rows back to the original feature space.
pub fn denormalize(
    data_norm: ArrayView2<'_, f64>,
    params: &NormalizationParams,
) -> Result<Array2<f64>> {
    params.inverse_transform(data_norm)
}

/// Splits `data` into (rows of every other class, rows of `minority_label`).
/// Row order is preserved within each part.
pub fn split_by_class(data: &Dataset, minority_label: usize) -> Result<(Dataset, Dataset)> {
    let (minority, majority): (Vec<usize>, Vec<usize>) =
        (0..data.n_rows()).partition(|&i| data.labels()[i] == minority_label);
    if minority.is_empty() {
        return Err(Error::invalid(format!(
            "label {minority_label} does not occur in the dataset"
        )));
    }
    Ok((data.select(&majority), data.select(&minority)))
}

/// Axis-aligned box `[lower, upper]` around a set of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl FeatureBounds {
    pub fn n_features(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, point: &[f64], tolerance: f64) -> bool {
        point.len() == self.n_features()
            && point
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&x, (&lo, &hi))| x >= lo - tolerance && x <= hi + tolerance)
    }
}

/// Column-wise min and max over the rows of `minority_norm`.
pub fn feature_bounds(minority_norm: &Dataset) -> Result<FeatureBounds> {
    if minority_norm.is_empty() {
        return Err(Error::invalid("feature bounds of an empty minority subset"));
    }
    let params = NormalizationParams::fit(minority_norm.features().view())?;
    Ok(FeatureBounds {
        lower: params.min_per_feature,
        upper: params.max_per_feature,
    })
}

/// Reads a headed CSV whose last column is the class label.
///
/// Labels that all parse as integers are ordered numerically, anything else
/// lexicographically; the resulting positions become the dense class ids.
pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    read_csv_from(file)
}

pub fn read_csv_from(reader: impl std::io::Read) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(h) => h?,
        None => return Err(Error::Format("missing header row".into())),
    };
    if header.len() < 2 {
        return Err(Error::Format(
            "header needs at least one feature column and a label column".into(),
        ));
    }
    if header.iter().all(|h| h.trim().parse::<f64>().is_ok()) {
        return Err(Error::Format(
            "first row is numeric; a header row is required".into(),
        ));
    }
    let n_features = header.len() - 1;
    let feature_names: Vec<String> = header
        .iter()
        .take(n_features)
        .map(|s| s.trim().to_string())
        .collect();

    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    for (r, record) in records.enumerate() {
        let record = record?;
        // Data rows are 1-based after the header, which is row 0.
        let row = r + 1;
        if record.len() != header.len() {
            return Err(Error::Format(format!(
                "row {row} has {} fields, header has {}",
                record.len(),
                header.len()
            )));
        }
        for (column, cell) in record.iter().take(n_features).enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                row,
                column,
                message: format!("{cell:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    column,
                    message: format!("{cell:?} is not finite"),
                });
            }
            values.push(v);
        }
        raw_labels.push(record[n_features].trim().to_string());
    }
    if raw_labels.len() < 2 {
        return Err(Error::invalid(format!(
            "dataset needs at least 2 rows, found {}",
            raw_labels.len()
        )));
    }

    let class_names = encode_labels(&raw_labels);
    let labels = raw_labels
        .iter()
        .map(|l| {
            class_names
                .iter()
                .position(|c| c == l)
                .expect("label was collected")
        })
        .collect();
    let features = Array2::from_shape_vec((raw_labels.len(), n_features), values)
        .expect("row widths checked while parsing");
    Dataset::new(features, labels)?
        .with_feature_names(feature_names)?
        .with_class_names(class_names)
}

fn encode_labels(raw: &[String]) -> Vec<String> {
    let distinct: BTreeSet<&String> = raw.iter().collect();
    let mut names: Vec<String> = distinct.into_iter().cloned().collect();
    if names.iter().all(|n| n.parse::<i64>().is_ok()) {
        names.sort_by_key(|n| n.parse::<i64>().expect("checked"));
    }
    names
}

/// Label text written for class `id`: the original name when it is an
/// integer, otherwise the dense id.
pub fn label_text(data: &Dataset, id: usize) -> String {
    match data.class_names().and_then(|n| n.get(id)) {
        Some(name) if name.parse::<i64>().is_ok() => name.clone(),
        _ => id.to_string(),
    }
}

/// Resolves a user-facing label (as written in the CSV) to its class id.
pub fn resolve_label(data: &Dataset, text: &str) -> Result<usize> {
    if let Some(names) = data.class_names() {
        if let Some(id) = names.iter().position(|n| n == text) {
            return Ok(id);
        }
    }
    match text.parse::<usize>() {
        Ok(id) if id < data.n_classes() && data.class_names().is_none() => Ok(id),
        _ => Err(Error::invalid(format!("unknown class label {text:?}"))),
    }
}

/// Writes `data` as CSV: header, then one row per instance with the label
/// last. Numbers use the shortest representation that parses back exactly.
pub fn write_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv_to(data, std::io::BufWriter::new(file))
}

pub fn write_csv_to(data: &Dataset, writer: impl std::io::Write) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(writer);
    let mut header: Vec<String> = match data.feature_names() {
        Some(names) => names.to_vec(),
        None => (1..=data.n_features()).map(|i| format!("x{i}")).collect(),
    };
    header.push("label".into());
    wtr.write_record(&header)?;
    let labels: Vec<String> = (0..data.n_classes()).map(|c| label_text(data, c)).collect();
    for (row, &label) in data.features().rows().into_iter().zip(data.labels()) {
        let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        record.push(labels[label].clone());
        wtr.write_record(&record)?;
    }
    wtr.flush()?;
    Ok(())
}
