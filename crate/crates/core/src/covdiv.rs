//! Coverage diversity of synthetic instances.
//!
//! The bounding box of a reference minority sample is divided into a regular
//! grid. Cells holding at least one reference point make up the minority
//! space; the score is the fraction of those cells that also hold a
//! synthetic point. Synthetic points outside the minority cells do not count.

use std::collections::BTreeSet;

use ndarray::{ArrayView1, ArrayView2};

use crate::error::{Error, Result};

pub const DEFAULT_CELLS_PER_DIM: usize = 10;

pub type Cell = Vec<usize>;

#[derive(Debug, Clone, PartialEq)]
pub struct CovDivGrid {
    /// Per-dimension `(min, max)` of the reference points.
    pub bounds: Vec<(f64, f64)>,
    pub cells_per_dim: usize,
    pub minority_cells: BTreeSet<Cell>,
}

impl CovDivGrid {
    pub fn new(reference: ArrayView2<'_, f64>, cells_per_dim: usize) -> Result<Self> {
        if reference.nrows() == 0 {
            return Err(Error::invalid("CovDiv needs at least one reference point"));
        }
        if cells_per_dim == 0 {
            return Err(Error::invalid("cells_per_dim must be at least 1"));
        }
        let bounds = reference
            .columns()
            .into_iter()
            .map(|c| {
                c.iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                        (lo.min(v), hi.max(v))
                    })
            })
            .collect();
        let mut grid = Self {
            bounds,
            cells_per_dim,
            minority_cells: BTreeSet::new(),
        };
        grid.minority_cells = reference
            .rows()
            .into_iter()
            .filter_map(|r| grid.cell_of(r))
            .collect();
        Ok(grid)
    }

    /// The cell holding `point`, or `None` outside the grid.
    pub fn cell_of(&self, point: ArrayView1<'_, f64>) -> Option<Cell> {
        point
            .iter()
            .zip(&self.bounds)
            .map(|(&x, &(lo, hi))| {
                if !(lo..=hi).contains(&x) {
                    return None;
                }
                if hi == lo {
                    return Some(0);
                }
                let pos = ((x - lo) / (hi - lo) * self.cells_per_dim as f64).floor() as usize;
                Some(pos.min(self.cells_per_dim - 1))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovDivReport {
    pub grid: CovDivGrid,
    /// Minority cells with no synthetic point.
    pub ncc: usize,
    pub total_cells: usize,
    pub covdiv: f64,
}

pub fn covdiv(
    reference_minority: ArrayView2<'_, f64>,
    synthetic: ArrayView2<'_, f64>,
    cells_per_dim: usize,
) -> Result<CovDivReport> {
    if synthetic.nrows() > 0 && synthetic.ncols() != reference_minority.ncols() {
        return Err(Error::invalid(format!(
            "synthetic points have {} dimensions, reference has {}",
            synthetic.ncols(),
            reference_minority.ncols()
        )));
    }
    let grid = CovDivGrid::new(reference_minority, cells_per_dim)?;
    let covered: BTreeSet<Cell> = synthetic
        .rows()
        .into_iter()
        .filter_map(|r| grid.cell_of(r))
        .filter(|c| grid.minority_cells.contains(c))
        .collect();
    let total_cells = grid.minority_cells.len();
    let ncc = total_cells - covered.len();
    Ok(CovDivReport {
        covdiv: 1.0 - ncc as f64 / total_cells as f64,
        ncc,
        total_cells,
        grid,
    })
}
