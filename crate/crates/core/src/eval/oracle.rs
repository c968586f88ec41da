//! Leave-one-out FNMR difference: how much the verification FNMR at a fixed
//! FMR changes when one sample and all of its pairs are removed, averaged
//! over a grid of FMR operating points. Quadratic in `n` per sample; used to
//! validate the distance-based labels, not to produce them.

use super::{fnmr, threshold_at_fmr, Grid, PairPool};
use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};

/// 20 log-spaced FMRs in `[1e-3, 1]`.
pub const DEFAULT_ORACLE_GRID: Grid = Grid::Log {
    start: 1e-3,
    end: 1.0,
    count: 20,
};

/// Caches the all-pairs pool so each sample only pays for its own removal.
pub struct FnmrDiffOracle<'a> {
    ds: &'a EmbeddingDataset,
    gram: Vec<f64>,
    full: PairPool,
}

impl<'a> FnmrDiffOracle<'a> {
    pub fn new(ds: &'a EmbeddingDataset) -> Self {
        let gram = ds.gram();
        let all: Vec<usize> = (0..ds.len()).collect();
        let full = PairPool::from_gram(&gram, ds.identities(), &all, "all samples");
        Self { ds, gram, full }
    }

    pub fn full_pool(&self) -> &PairPool {
        &self.full
    }

    /// Pool over every pair that does not involve sample `i`.
    pub fn pool_without(&self, i: usize) -> Result<PairPool> {
        let n = self.ds.len();
        if i >= n {
            return Err(Error::Validation(format!("sample index {i} out of range for {n} samples")));
        }
        let id = self.ds.identity(i);
        let mut own_pos = Vec::new();
        let mut own_neg = Vec::new();
        for j in (0..n).filter(|&j| j != i) {
            let s = self.gram[i * n + j];
            if self.ds.identity(j) == id {
                own_pos.push(s);
            } else {
                own_neg.push(s);
            }
        }
        own_pos.sort_by(f64::total_cmp);
        own_neg.sort_by(f64::total_cmp);
        Ok(PairPool::new(
            remove_sorted(self.full.pos(), &own_pos),
            remove_sorted(self.full.neg(), &own_neg),
            format!("all samples except {i}"),
        ))
    }

    /// Mean over `fmr_grid` of `FNMR(X) - FNMR(X \ {x_i})`, each side at its
    /// own threshold for the grid FMR.
    pub fn fnmr_difference(&self, i: usize, fmr_grid: &[f64]) -> Result<f64> {
        if fmr_grid.is_empty() {
            return Err(Error::EmptyInput("FMR grid is empty"));
        }
        if let Some(bad) = fmr_grid.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
            return Err(Error::Config(format!("grid FMR {bad} outside (0, 1]")));
        }
        if i < self.ds.len() && self.ds.class_size(i) < 2 {
            return Err(Error::NoPositivePairs { index: i });
        }
        let reduced = self.pool_without(i)?;
        if reduced.pos().is_empty() || reduced.neg().is_empty() {
            return Err(Error::Validation(format!(
                "removing sample {i} leaves no genuine or no impostor pairs"
            )));
        }
        let mut total = 0.0;
        for &target in fmr_grid {
            let before = fnmr(&self.full, threshold_at_fmr(&self.full, target)?)?;
            let after = fnmr(&reduced, threshold_at_fmr(&reduced, target)?)?;
            total += before - after;
        }
        Ok(total / fmr_grid.len() as f64)
    }

    /// Quality orientation of [`Self::fnmr_difference`]: a sample whose
    /// removal lowers the error rate scores low.
    pub fn quality(&self, i: usize, fmr_grid: &[f64]) -> Result<f64> {
        Ok(-self.fnmr_difference(i, fmr_grid)?)
    }
}

pub fn fnmr_diff_oracle(ds: &EmbeddingDataset, i: usize, fmr_grid: &[f64]) -> Result<f64> {
    FnmrDiffOracle::new(ds).quality(i, fmr_grid)
}

/// Multiset difference of two ascending lists; every element of `remove`
/// must occur in `from`.
fn remove_sorted(from: &[f64], remove: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(from.len().saturating_sub(remove.len()));
    let mut k = 0;
    for &v in from {
        if k < remove.len() && v.total_cmp(&remove[k]).is_eq() {
            k += 1;
        } else {
            out.push(v);
        }
    }
    debug_assert_eq!(k, remove.len(), "removed values must be present in the pool");
    out
}
