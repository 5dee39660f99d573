//! The SOMM over-sampler.
//!
//! Candidates are drawn uniformly inside the bounding box of the normalized
//! minority rows. Each candidate's `k` nearest training rows decide its fate:
//!
//! 1. no minority row among them: the candidate is dropped;
//! 2. the nearest row is minority: the candidate is kept as drawn;
//! 3. otherwise the neighbor list is cut at the first minority row `nn_B`
//!    and the candidate is moved toward `nn_B`, past the furthest projection
//!    of the preceding majority rows onto that direction, but never onto
//!    `nn_B` itself.
//!
//! Retained candidates are mapped back to the original feature space.
//!
//! Candidate `i` draws all of its randomness from stream `i` of the run seed
//! (see [`crate::rng`]), so candidates are evaluated in parallel batches and
//! then consumed in index order without changing the result.

use ndarray::Array2;
use rand::distr::Open01;
use rand::Rng;
use rayon::prelude::*;

use crate::data::{
    feature_bounds, normalize, split_by_class, Dataset, FeatureBounds, NormalizationParams,
};
use crate::error::{Error, Result};
use crate::neighbors::{k_nearest, NeighborSet};
use crate::rng::{child_seed, stream_rng};

/// Fraction of `dis_B` that the lower end of the magnitude interval may not
/// exceed, so the interval stays non-empty.
pub const MAGNITUDE_MARGIN: f64 = 1e-6;

/// How many synthetic instances to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticCount {
    /// As many as needed to bring the minority class up to the size of the
    /// (pooled) majority.
    Auto,
    Exact(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SommConfig {
    /// Neighborhood size used by the placement rules.
    pub k: usize,
    pub n_synthetic: SyntheticCount,
    /// Total candidates are capped at `n_synthetic * max_attempts_factor`.
    pub max_attempts_factor: usize,
    pub seed: u64,
}

impl Default for SommConfig {
    fn default() -> Self {
        Self {
            k: 15,
            n_synthetic: SyntheticCount::Auto,
            max_attempts_factor: 50,
            seed: 0,
        }
    }
}

impl SommConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if self.max_attempts_factor == 0 {
            return Err(Error::invalid("max_attempts_factor must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateStatus {
    Generated,
    Removed,
    KeptRule2,
    /// Rule 3 applied but the candidate sits exactly on `nn_B`; kept as is.
    KeptCoincident,
    UpdatedRule3,
}

/// A point drawn in normalized space.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateInstance {
    pub position: Vec<f64>,
    pub status: CandidateStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleDecision {
    Remove,
    KeepAsIs,
    /// Move toward the minority neighbor at position `index_b`.
    Update {
        index_b: usize,
    },
}

/// The movement of one rule-3 candidate toward its nearest minority neighbor.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateGeometry {
    /// Unit vector from the candidate toward `nn_B`.
    pub dir_unit: Vec<f64>,
    pub dis_b: f64,
    /// Distances to the majority neighbors that precede `nn_B`.
    pub dis_a: Vec<f64>,
    pub cos_theta: Vec<f64>,
    /// Signed projections of those majority neighbors onto `dir_unit`.
    pub dis_p: Vec<f64>,
    pub max_disp: f64,
    /// Chosen step length, strictly inside `magnitude_interval()`.
    pub m: f64,
}

impl UpdateGeometry {
    /// The open interval the step length is drawn from.
    pub fn magnitude_interval(&self) -> (f64, f64) {
        (magnitude_lower_bound(self.max_disp, self.dis_b), self.dis_b)
    }
}

/// `max_disp` clamped into `[0, dis_b * (1 - MAGNITUDE_MARGIN)]`.
pub fn magnitude_lower_bound(max_disp: f64, dis_b: f64) -> f64 {
    max_disp.clamp(0.0, dis_b * (1.0 - MAGNITUDE_MARGIN))
}

/// Draws one coordinate per feature uniformly from `[lower, upper]`.
pub fn generate_candidate<R: Rng + ?Sized>(
    bounds: &FeatureBounds,
    rng: &mut R,
) -> CandidateInstance {
    let position = bounds
        .lower
        .iter()
        .zip(&bounds.upper)
        .map(|(&lo, &hi)| {
            if lo < hi {
                rng.random_range(lo..=hi)
            } else {
                lo
            }
        })
        .collect();
    CandidateInstance {
        position,
        status: CandidateStatus::Generated,
    }
}

/// Applies the three placement rules to a candidate's ordered neighborhood.
pub fn classify_candidate(neighbors: &NeighborSet) -> RuleDecision {
    match neighbors.index_b {
        None => RuleDecision::Remove,
        Some(0) => RuleDecision::KeepAsIs,
        Some(index_b) => RuleDecision::Update { index_b },
    }
}

/// Projects the majority neighbors preceding `nn_B` onto the direction from
/// the candidate to `nn_B` and draws the step length.
///
/// Returns `Ok(None)` when the candidate coincides with `nn_B`, in which case
/// there is no direction to move in and the caller keeps the candidate.
pub fn compute_update_geometry<R: Rng + ?Sized>(
    candidate: &[f64],
    neighbors: &NeighborSet,
    train_norm: &Dataset,
    rng: &mut R,
) -> Result<Option<UpdateGeometry>> {
    let index_b = match neighbors.index_b {
        Some(b) if b >= 1 => b,
        _ => {
            return Err(Error::invalid(
                "update geometry needs at least one majority neighbor before the first minority neighbor",
            ))
        }
    };
    let nn_b = train_norm.row(neighbors.indices[index_b]);
    let dir: Vec<f64> = nn_b.iter().zip(candidate).map(|(b, s)| b - s).collect();
    let dis_b = norm(&dir);
    if dis_b == 0.0 {
        return Ok(None);
    }
    let dir_unit: Vec<f64> = dir.iter().map(|d| d / dis_b).collect();

    let mut dis_a = Vec::with_capacity(index_b);
    let mut cos_theta = Vec::with_capacity(index_b);
    let mut dis_p = Vec::with_capacity(index_b);
    for &row in &neighbors.indices[..index_b] {
        let dir_a: Vec<f64> = train_norm
            .row(row)
            .iter()
            .zip(candidate)
            .map(|(a, s)| a - s)
            .collect();
        let len_a = norm(&dir_a);
        // A majority row on top of the candidate has no direction; it
        // projects to zero.
        let cos = if len_a > 0.0 {
            dot(&dir_a, &dir) / (len_a * dis_b)
        } else {
            0.0
        };
        dis_a.push(len_a);
        cos_theta.push(cos);
        dis_p.push(len_a * cos);
    }
    let max_disp = dis_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lower = magnitude_lower_bound(max_disp, dis_b);
    let m = draw_open(lower, dis_b, rng);
    Ok(Some(UpdateGeometry {
        dir_unit,
        dis_b,
        dis_a,
        cos_theta,
        dis_p,
        max_disp,
        m,
    }))
}

/// `candidate + dir_unit * m`.
pub fn apply_update(candidate: &[f64], geometry: &UpdateGeometry) -> Vec<f64> {
    candidate
        .iter()
        .zip(&geometry.dir_unit)
        .map(|(s, d)| s + d * geometry.m)
        .collect()
}

/// Uniform draw from the open interval `(lo, hi)`; needs `lo < hi`.
fn draw_open<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    for _ in 0..64 {
        let u: f64 = rng.sample(Open01);
        let m = lo + u * (hi - lo);
        if lo < m && m < hi {
            return m;
        }
    }
    // Only reachable when no float lies strictly between lo and hi.
    0.5 * (lo + hi)
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Synthetic rows produced for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct SommOutput {
    /// Synthetic instances in the original feature space.
    pub synthetic: Array2<f64>,
    pub assigned_label: usize,
    /// Candidates generated, including removed ones.
    pub attempts_used: usize,
    pub removed_count: usize,
}

/// Everything that happened to one candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateTrace {
    pub index: usize,
    pub candidate: CandidateInstance,
    pub neighbors: NeighborSet,
    pub decision: RuleDecision,
    pub geometry: Option<UpdateGeometry>,
    /// Retained position in normalized space, `None` if removed.
    pub retained: Option<Vec<f64>>,
}

struct RunContext<'a> {
    train_norm: &'a Dataset,
    bounds: FeatureBounds,
    minority_label: usize,
    k: usize,
    seed: u64,
}

impl RunContext<'_> {
    fn evaluate(&self, index: usize) -> Result<CandidateTrace> {
        let mut rng = stream_rng(self.seed, index as u64);
        let mut candidate = generate_candidate(&self.bounds, &mut rng);
        let neighbors = k_nearest(
            &candidate.position,
            self.train_norm,
            self.minority_label,
            self.k,
        )?;
        let decision = classify_candidate(&neighbors);
        let mut geometry = None;
        let retained = match decision {
            RuleDecision::Remove => {
                candidate.status = CandidateStatus::Removed;
                None
            }
            RuleDecision::KeepAsIs => {
                candidate.status = CandidateStatus::KeptRule2;
                Some(candidate.position.clone())
            }
            RuleDecision::Update { .. } => {
                match compute_update_geometry(
                    &candidate.position,
                    &neighbors,
                    self.train_norm,
                    &mut rng,
                )? {
                    None => {
                        candidate.status = CandidateStatus::KeptCoincident;
                        Some(candidate.position.clone())
                    }
                    Some(g) => {
                        candidate.status = CandidateStatus::UpdatedRule3;
                        let mut moved = apply_update(&candidate.position, &g);
                        // The segment from candidate to nn_B lies in the box;
                        // this only absorbs last-bit rounding.
                        for (x, (&lo, &hi)) in moved
                            .iter_mut()
                            .zip(self.bounds.lower.iter().zip(&self.bounds.upper))
                        {
                            *x = x.clamp(lo, hi);
                        }
                        geometry = Some(g);
                        Some(moved)
                    }
                }
            }
        };
        Ok(CandidateTrace {
            index,
            candidate,
            neighbors,
            decision,
            geometry,
            retained,
        })
    }
}

/// Generates synthetic instances for `minority_label`, treating every other
/// class as majority.
pub fn somm_oversample(
    train: &Dataset,
    minority_label: usize,
    config: &SommConfig,
) -> Result<SommOutput> {
    run(train, minority_label, config, None)
}

/// Like [`somm_oversample`], also returning the trace of every candidate
/// consumed, in candidate order.
pub fn somm_oversample_traced(
    train: &Dataset,
    minority_label: usize,
    config: &SommConfig,
) -> Result<(SommOutput, Vec<CandidateTrace>)> {
    let mut trace = Vec::new();
    let out = run(train, minority_label, config, Some(&mut trace))?;
    Ok((out, trace))
}

fn run(
    train: &Dataset,
    minority_label: usize,
    config: &SommConfig,
    mut trace: Option<&mut Vec<CandidateTrace>>,
) -> Result<SommOutput> {
    config.validate()?;
    let n_minority = train.count_of(minority_label);
    let n_majority = train.n_rows() - n_minority;
    if n_minority == 0 {
        return Err(Error::invalid(format!(
            "minority class {minority_label} is empty"
        )));
    }
    if n_majority == 0 {
        return Err(Error::invalid("majority class is empty"));
    }
    if config.k > train.n_rows() {
        return Err(Error::invalid(format!(
            "k = {} exceeds the {} training rows",
            config.k,
            train.n_rows()
        )));
    }
    let requested = match config.n_synthetic {
        SyntheticCount::Exact(n) => n,
        SyntheticCount::Auto if n_minority <= n_majority => n_majority - n_minority,
        SyntheticCount::Auto => {
            return Err(Error::invalid(format!(
                "class {minority_label} has {n_minority} rows, more than the {n_majority} majority rows"
            )))
        }
    };

    let (train_norm, params) = normalize(train)?;
    let (_, minority_norm) = split_by_class(&train_norm, minority_label)?;
    let ctx = RunContext {
        bounds: feature_bounds(&minority_norm)?,
        train_norm: &train_norm,
        minority_label,
        k: config.k,
        seed: config.seed,
    };

    let cap = requested.saturating_mul(config.max_attempts_factor);
    let mut retained: Vec<Vec<f64>> = Vec::with_capacity(requested);
    let mut attempts = 0;
    let mut removed = 0;
    let mut next = 0;
    while retained.len() < requested && next < cap {
        let needed = requested - retained.len();
        let batch = (2 * needed).clamp(16, 4096).min(cap - next);
        let records = (next..next + batch)
            .into_par_iter()
            .map(|i| ctx.evaluate(i))
            .collect::<Result<Vec<_>>>()?;
        next += batch;
        for record in records {
            attempts += 1;
            match &record.retained {
                Some(p) => retained.push(p.clone()),
                None => removed += 1,
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(record);
            }
            if retained.len() == requested {
                break;
            }
        }
    }

    let output = SommOutput {
        synthetic: to_original_space(&retained, &params)?,
        assigned_label: minority_label,
        attempts_used: attempts,
        removed_count: removed,
    };
    if retained.len() < requested {
        return Err(Error::AttemptCap {
            cap,
            requested,
            partial: Box::new(output),
        });
    }
    Ok(output)
}

fn to_original_space(rows: &[Vec<f64>], params: &NormalizationParams) -> Result<Array2<f64>> {
    let width = params.n_features();
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    let normalized =
        Array2::from_shape_vec((rows.len(), width), flat).expect("rows have the feature width");
    params.inverse_transform(normalized.view())
}

/// Balances every class to the size of the largest one, running
/// [`somm_oversample`] for each smaller class (ascending id) against the
/// pooled remainder of the original training data.
///
/// The original rows come first, followed by each class's synthetic rows.
/// Class `c` uses the seed `child_seed(config.seed, c)`.
pub fn somm_multiclass(train: &Dataset, config: &SommConfig) -> Result<Dataset> {
    let counts = train.class_counts();
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::invalid(
            "multiclass balancing needs at least 2 classes",
        ));
    }
    let target = counts.iter().copied().max().unwrap_or(0);
    let mut balanced = train.clone();
    for (class, &count) in counts.iter().enumerate() {
        if count == 0 || count == target {
            continue;
        }
        let class_config = SommConfig {
            n_synthetic: SyntheticCount::Exact(target - count),
            seed: child_seed(config.seed, class as u64),
            ..*config
        };
        let out = somm_oversample(train, class, &class_config).map_err(|e| Error::Class {
            class,
            source: Box::new(e),
        })?;
        balanced = balanced.append(out.synthetic.view(), class)?;
    }
    Ok(balanced)
}
