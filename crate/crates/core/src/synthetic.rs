//! Six two-dimensional class geometries for diversity and classification
//! experiments. Label 0 is the majority class, label 1 the minority class.
//!
//! | family | majority                         | minority                                   |
//! |--------|----------------------------------|--------------------------------------------|
//! | SD1    | N((0,0), 1.0)                    | equal mix of N((-2.5,0), 0.45), N((2.5,0), 0.45) |
//! | SD2    | equal mix of N((-3,0), 0.8), N((3,0), 0.8) | N((0,0), 0.6)                    |
//! | SD3    | N((0,0), 1.0)                    | N((4,4), 0.7)                              |
//! | SD4    | uniform on the disk of radius 3  | N((0.8,0.8), 0.4)                          |
//! | SD5    | N((0,0), 2.0)                    | upper crescent, angle U(0, pi), radius N(1.5, 0.15) |
//! | SD6    | N((0,0), 1.5)                    | N((0,0), 0.4)                              |
//!
//! Gaussians are isotropic with the given standard deviation.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, ChaCha8Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntheticFamily {
    Sd1,
    Sd2,
    Sd3,
    Sd4,
    Sd5,
    Sd6,
}

impl SyntheticFamily {
    pub const ALL: [SyntheticFamily; 6] = [
        SyntheticFamily::Sd1,
        SyntheticFamily::Sd2,
        SyntheticFamily::Sd3,
        SyntheticFamily::Sd4,
        SyntheticFamily::Sd5,
        SyntheticFamily::Sd6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SyntheticFamily::Sd1 => "sd1",
            SyntheticFamily::Sd2 => "sd2",
            SyntheticFamily::Sd3 => "sd3",
            SyntheticFamily::Sd4 => "sd4",
            SyntheticFamily::Sd5 => "sd5",
            SyntheticFamily::Sd6 => "sd6",
        }
    }
}

impl fmt::Display for SyntheticFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyntheticFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SyntheticFamily::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::invalid(format!("unknown synthetic family {s:?}; expected sd1..sd6"))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub family: SyntheticFamily,
    pub n_majority: usize,
    pub n_minority: usize,
    pub seed: u64,
}

/// Majority rows first, then minority rows. The two classes use separate
/// streams of the seed, so the minority sample does not depend on
/// `n_majority` and vice versa.
pub fn generate(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.n_majority == 0 || spec.n_minority == 0 {
        return Err(Error::invalid("synthetic class counts must be at least 1"));
    }
    let mut maj_rng = stream_rng(spec.seed, 0);
    let mut min_rng = stream_rng(spec.seed, 1);
    let mut rows = Vec::with_capacity(2 * (spec.n_majority + spec.n_minority));
    for _ in 0..spec.n_majority {
        rows.extend(majority_point(spec.family, &mut maj_rng));
    }
    for _ in 0..spec.n_minority {
        rows.extend(minority_point(spec.family, &mut min_rng));
    }
    let n = spec.n_majority + spec.n_minority;
    let labels = std::iter::repeat_n(0, spec.n_majority)
        .chain(std::iter::repeat_n(1, spec.n_minority))
        .collect();
    Dataset::new(
        Array2::from_shape_vec((n, 2), rows).expect("two coordinates per row"),
        labels,
    )?
    .with_feature_names(vec!["x1".into(), "x2".into()])
}

fn gaussian(rng: &mut ChaCha8Rng, center: (f64, f64), sd: f64) -> [f64; 2] {
    let normal = Normal::new(0.0, sd).expect("positive standard deviation");
    [center.0 + normal.sample(rng), center.1 + normal.sample(rng)]
}

fn either(rng: &mut ChaCha8Rng, a: (f64, f64), b: (f64, f64), sd: f64) -> [f64; 2] {
    let center = if rng.random_bool(0.5) { a } else { b };
    gaussian(rng, center, sd)
}

fn majority_point(family: SyntheticFamily, rng: &mut ChaCha8Rng) -> [f64; 2] {
    match family {
        SyntheticFamily::Sd1 | SyntheticFamily::Sd3 => gaussian(rng, (0.0, 0.0), 1.0),
        SyntheticFamily::Sd2 => either(rng, (-3.0, 0.0), (3.0, 0.0), 0.8),
        SyntheticFamily::Sd4 => {
            let r = 3.0 * rng.random::<f64>().sqrt();
            let angle = rng.random_range(0.0..2.0 * PI);
            [r * angle.cos(), r * angle.sin()]
        }
        SyntheticFamily::Sd5 => gaussian(rng, (0.0, 0.0), 2.0),
        SyntheticFamily::Sd6 => gaussian(rng, (0.0, 0.0), 1.5),
    }
}

fn minority_point(family: SyntheticFamily, rng: &mut ChaCha8Rng) -> [f64; 2] {
    match family {
        SyntheticFamily::Sd1 => either(rng, (-2.5, 0.0), (2.5, 0.0), 0.45),
        SyntheticFamily::Sd2 => gaussian(rng, (0.0, 0.0), 0.6),
        SyntheticFamily::Sd3 => gaussian(rng, (4.0, 4.0), 0.7),
        SyntheticFamily::Sd4 => gaussian(rng, (0.8, 0.8), 0.4),
        SyntheticFamily::Sd5 => {
            let angle = rng.random_range(0.0..=PI);
            let r = Normal::new(1.5, 0.15)
                .expect("positive standard deviation")
                .sample(rng);
            [r * angle.cos(), r * angle.sin()]
        }
        SyntheticFamily::Sd6 => gaussian(rng, (0.0, 0.0), 0.4),
    }
}
