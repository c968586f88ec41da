//! Biometric verification error rates and quality-scorer evaluation.
//!
//! Decision rule: a pair matches when its similarity is strictly above the
//! threshold `ξ`. FMR counts impostor scores `> ξ`, FNMR counts genuine
//! scores `< ξ`; a genuine score equal to `ξ` is neither.

mod evrc;
mod grid;
mod oracle;

use serde::{Deserialize, Serialize};

use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};

pub use evrc::{aoc, evrc, kept_count, load_curve_csv, shared_upper_bound, read_curve_csv, write_curve_csv, CurveSidecar, EvrcCurve, EvrcPoint};
pub use grid::Grid;
pub use oracle::{fnmr_diff_oracle, FnmrDiffOracle, DEFAULT_ORACLE_GRID};

pub const DEFAULT_AOC_LOWER: f64 = 0.0;
pub const DEFAULT_AOC_UPPER: f64 = 0.95;
pub const DEFAULT_FIXED_FMRS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Genuine and impostor similarity scores over some sample set. Both lists
/// are kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairPool {
    pos: Vec<f64>,
    neg: Vec<f64>,
    pub provenance: String,
}

impl PairPool {
    pub fn new(mut pos: Vec<f64>, mut neg: Vec<f64>, provenance: impl Into<String>) -> Self {
        pos.sort_by(f64::total_cmp);
        neg.sort_by(f64::total_cmp);
        Self {
            pos,
            neg,
            provenance: provenance.into(),
        }
    }

    /// Every unordered pair among `ds` rows.
    pub fn from_dataset(ds: &EmbeddingDataset) -> Self {
        let all: Vec<usize> = (0..ds.len()).collect();
        Self::from_gram(&ds.gram(), ds.identities(), &all, "all samples")
    }

    /// Unordered pairs among `members`, with similarities read from a
    /// precomputed row-major Gram matrix.
    pub fn from_gram(gram: &[f64], identities: &[u64], members: &[usize], provenance: impl Into<String>) -> Self {
        let n = identities.len();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                let s = gram[i * n + j];
                if identities[i] == identities[j] {
                    pos.push(s);
                } else {
                    neg.push(s);
                }
            }
        }
        Self::new(pos, neg, provenance)
    }

    pub fn pos(&self) -> &[f64] {
        &self.pos
    }

    pub fn neg(&self) -> &[f64] {
        &self.neg
    }

    /// Impostor count strictly above `xi`.
    fn false_matches(&self, xi: f64) -> usize {
        self.neg.len() - self.neg.partition_point(|&s| s <= xi)
    }
}

/// Fraction of impostor similarities strictly greater than `xi`.
pub fn fmr(pool: &PairPool, xi: f64) -> Result<f64> {
    if pool.neg.is_empty() {
        return Err(Error::EmptyInput("pair pool has no impostor pairs"));
    }
    Ok(pool.false_matches(xi) as f64 / pool.neg.len() as f64)
}

/// Fraction of genuine similarities strictly less than `xi`.
pub fn fnmr(pool: &PairPool, xi: f64) -> Result<f64> {
    if pool.pos.is_empty() {
        return Err(Error::EmptyInput("pair pool has no genuine pairs"));
    }
    Ok(pool.pos.partition_point(|&s| s < xi) as f64 / pool.pos.len() as f64)
}

/// Smallest threshold among the impostor scores and `1.0` whose FMR does not
/// exceed `target_fmr`. Step-function inverse, no interpolation.
pub fn threshold_at_fmr(pool: &PairPool, target_fmr: f64) -> Result<f64> {
    if pool.neg.is_empty() {
        return Err(Error::EmptyInput("pair pool has no impostor pairs"));
    }
    if !(0.0..=1.0).contains(&target_fmr) {
        return Err(Error::Config(format!("target FMR {target_fmr} outside [0, 1]")));
    }
    let total = pool.neg.len() as f64;
    let exceeds = |xi: f64| pool.false_matches(xi) as f64 / total > target_fmr;
    // FMR is nonincreasing along the sorted candidates, so the infeasible
    // ones form a prefix.
    let first_ok = pool.neg.partition_point(|&s| exceeds(s));
    Ok(pool.neg.get(first_ok).copied().unwrap_or(1.0))
}
