//! Identity-labeled embedding datasets and per-sample similarity profiles.

mod io;

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::rng_from_seed;

pub use io::{load_dataset, read_binary, read_csv, save_dataset, write_binary, write_csv, DatasetFormat};

/// `n` unit-norm embeddings in `R^d`, each tagged with an opaque identity id.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingDataset {
    dim: usize,
    embeddings: Vec<f64>,
    identities: Vec<u64>,
    identity_index: BTreeMap<u64, Vec<usize>>,
}

impl EmbeddingDataset {
    /// Builds a dataset from row-major values, L2-normalizing every row.
    pub fn new(mut embeddings: Vec<f64>, dim: usize, identities: Vec<u64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Validation(format!("dimension must be >= 2, got {dim}")));
        }
        if embeddings.len() != identities.len() * dim {
            return Err(Error::Format(format!(
                "{} values do not form {} rows of dimension {dim}",
                embeddings.len(),
                identities.len()
            )));
        }
        let n = identities.len();
        if n < 2 {
            return Err(Error::Validation(format!("need at least 2 samples, got {n}")));
        }
        for (row, chunk) in embeddings.chunks_mut(dim).enumerate() {
            if let Some(col) = chunk.iter().position(|v| !v.is_finite()) {
                return Err(Error::Validation(format!("non-finite value at row {row}, column {col}")));
            }
            let norm = chunk.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::ZeroNormRow { row });
            }
            chunk.iter_mut().for_each(|v| *v /= norm);
        }
        let mut identity_index: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (row, &id) in identities.iter().enumerate() {
            identity_index.entry(id).or_default().push(row);
        }
        Ok(Self {
            dim,
            embeddings,
            identities,
            identity_index,
        })
    }

    pub fn len(&self) -> usize {
        self.identities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.identities.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.embeddings[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.embeddings.chunks(self.dim)
    }

    pub fn identities(&self) -> &[u64] {
        &self.identities
    }

    pub fn identity(&self, i: usize) -> u64 {
        self.identities[i]
    }

    pub fn identity_index(&self) -> &BTreeMap<u64, Vec<usize>> {
        &self.identity_index
    }

    /// Rows sharing the identity of sample `i`, ascending, including `i`.
    pub fn classmates(&self, i: usize) -> &[usize] {
        &self.identity_index[&self.identities[i]]
    }

    pub fn class_size(&self, i: usize) -> usize {
        self.classmates(i).len()
    }

    pub fn num_identities(&self) -> usize {
        self.identity_index.len()
    }

    /// Cosine similarity between two rows (both unit norm), clamped to [-1, 1].
    pub fn similarity(&self, i: usize, j: usize) -> f64 {
        dot(self.row(i), self.row(j)).clamp(-1.0, 1.0)
    }

    /// New dataset holding the given rows in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.dim);
        let mut ids = Vec::with_capacity(indices.len());
        for &i in indices {
            self.check_index(i)?;
            values.extend_from_slice(self.row(i));
            ids.push(self.identity(i));
        }
        Self::new(values, self.dim, ids)
    }

    /// Symmetric `n × n` cosine similarity matrix, row-major. Entry `(i, j)`
    /// and `(j, i)` are bitwise equal.
    pub fn gram(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let s = self.similarity(i, j);
                out[i * n + j] = s;
                out[j * n + i] = s;
            }
        }
        out
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::Validation(format!(
                "sample index {i} out of range for {} samples",
                self.len()
            )));
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(dot(a, b).clamp(-1.0, 1.0))
}

/// The genuine (`pos`) and impostor (`neg`) similarities seen from one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityProfile {
    pub owner: usize,
    pub pos: Vec<f64>,
    pub neg: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// Similarities drawn per side in each repeat.
    pub m: usize,
    /// Number of independent repeats averaged together.
    #[serde(rename = "K")]
    pub k: usize,
    pub master_seed: u64,
}

impl SamplingConfig {
    pub const DEFAULT_M: usize = 24;
    pub const DEFAULT_K: usize = 12;

    pub fn new(m: usize, k: usize, master_seed: u64) -> Result<Self> {
        let cfg = Self { m, k, master_seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.k == 0 {
            return Err(Error::Config(format!(
                "m and K must be >= 1 (m={}, K={})",
                self.m, self.k
            )));
        }
        Ok(())
    }
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            m: Self::DEFAULT_M,
            k: Self::DEFAULT_K,
            master_seed: 0,
        }
    }
}

/// Exhaustive profile of sample `i`, partners visited in ascending row order.
pub fn similarity_profile(ds: &EmbeddingDataset, i: usize) -> Result<SimilarityProfile> {
    ds.check_index(i)?;
    let id = ds.identity(i);
    let class = ds.classmates(i);
    if class.len() < 2 {
        return Err(Error::NoPositivePairs { index: i });
    }
    let mut pos = Vec::with_capacity(class.len() - 1);
    let mut neg = Vec::with_capacity(ds.len() - class.len());
    for j in 0..ds.len() {
        if j == i {
            continue;
        }
        let s = ds.similarity(i, j);
        if ds.identity(j) == id {
            pos.push(s);
        } else {
            neg.push(s);
        }
    }
    Ok(SimilarityProfile { owner: i, pos, neg })
}

/// Draws `m` genuine and `m` impostor similarities for sample `i`, uniformly
/// with replacement over the eligible partners. Cost is independent of `n`.
pub fn sample_profile(ds: &EmbeddingDataset, i: usize, m: usize, rng_seed: u64) -> Result<SimilarityProfile> {
    ds.check_index(i)?;
    if m == 0 {
        return Err(Error::Config("m must be >= 1".into()));
    }
    let class = ds.classmates(i);
    if class.len() < 2 {
        return Err(Error::NoPositivePairs { index: i });
    }
    let others = ds.len() - class.len();
    if others == 0 {
        return Err(Error::NoNegativePairs { index: i });
    }
    let self_pos = class.partition_point(|&r| r < i);
    let mut rng = rng_from_seed(rng_seed);

    let pos = (0..m)
        .map(|_| {
            let r = rng.random_range(0..class.len() - 1);
            let j = if r < self_pos { class[r] } else { class[r + 1] };
            ds.similarity(i, j)
        })
        .collect();
    let neg = (0..m)
        .map(|_| {
            let r = rng.random_range(0..others);
            ds.similarity(i, nth_outside(class, r))
        })
        .collect();
    Ok(SimilarityProfile { owner: i, pos, neg })
}

/// The `r`-th (0-based) row index not contained in the sorted list `members`.
fn nth_outside(members: &[usize], r: usize) -> usize {
    let mut row = r;
    for &m in members {
        if m <= row {
            row += 1;
        } else {
            break;
        }
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_rows() -> EmbeddingDataset {
        EmbeddingDataset::new(
            vec![1.0, 0.0, 0.0, 0.8, 0.6, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0],
            3,
            vec![10, 10, 20, 20],
        )
        .unwrap()
    }

    #[test]
    fn identity_index_built() {
        let ds = four_rows();
        assert_eq!(ds.len(), 4);
        assert_eq!(ds.identity_index()[&10], vec![0, 1]);
        assert_eq!(ds.identity_index()[&20], vec![2, 3]);
    }

    #[test]
    fn rows_are_normalized() {
        let ds = EmbeddingDataset::new(vec![3.0, 4.0, 1.0, 0.0], 2, vec![1, 2]).unwrap();
        assert!((ds.row(0)[0] - 0.6).abs() < 1e-15);
        assert!((ds.row(0)[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn zero_row_is_rejected() {
        let err = EmbeddingDataset::new(vec![1.0, 0.0, 0.0, 0.0], 2, vec![1, 2]).unwrap_err();
        assert!(matches!(err, Error::ZeroNormRow { row: 1 }));
    }

    #[test]
    fn non_finite_is_rejected() {
        let err = EmbeddingDataset::new(vec![1.0, f64::NAN, 0.0, 1.0], 2, vec![1, 2]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        let err = EmbeddingDataset::new(vec![1.0, f64::INFINITY, 0.0, 1.0], 2, vec![1, 2]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn too_small_is_rejected() {
        assert!(EmbeddingDataset::new(vec![1.0, 0.0], 2, vec![1]).is_err());
        assert!(EmbeddingDataset::new(vec![1.0, 1.0], 1, vec![1, 2]).is_err());
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[-1.0, 0.0]).unwrap(), -1.0);
        assert!((cosine_similarity(&[1.0, 0.0], &[0.6, 0.8]).unwrap() - 0.6).abs() < 1e-15);
        assert!(matches!(
            cosine_similarity(&[1.0, 0.0], &[1.0, 0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cosine_clamps_rounding_overshoot() {
        let v = [0.1f64.sqrt(), 0.9f64.sqrt()];
        let s = cosine_similarity(&v, &v).unwrap();
        assert!(s <= 1.0);
    }

    #[test]
    fn exhaustive_profile_counts() {
        let ds = four_rows();
        let p = similarity_profile(&ds, 0).unwrap();
        assert_eq!(p.pos.len(), 1);
        assert!((p.pos[0] - 0.8).abs() < 1e-15);
        assert_eq!(p.neg, vec![0.0, 0.0]);
    }

    #[test]
    fn identical_embeddings_profile() {
        let ds = EmbeddingDataset::new(vec![0.5; 12], 3, vec![1, 1, 2, 2]).unwrap();
        let p = similarity_profile(&ds, 0).unwrap();
        assert_eq!(p.pos.len(), 1);
        assert!((p.pos[0] - 1.0).abs() < 1e-12);
        assert!(p.neg.iter().all(|s| (s - 1.0).abs() < 1e-12));
    }

    #[test]
    fn singleton_has_no_positive_pairs() {
        let ds = EmbeddingDataset::new(vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0], 2, vec![1, 2, 2]).unwrap();
        assert!(matches!(similarity_profile(&ds, 0), Err(Error::NoPositivePairs { index: 0 })));
        assert!(matches!(sample_profile(&ds, 0, 4, 1), Err(Error::NoPositivePairs { index: 0 })));
    }

    #[test]
    fn single_identity_has_no_negatives() {
        let ds = EmbeddingDataset::new(vec![1.0, 0.0, 0.0, 1.0], 2, vec![5, 5]).unwrap();
        assert!(matches!(sample_profile(&ds, 0, 4, 1), Err(Error::NoNegativePairs { index: 0 })));
    }

    #[test]
    fn sampled_sizes_and_replacement() {
        let ds = EmbeddingDataset::new(
            vec![1.0, 0.0, 0.9, 0.1, 0.8, 0.3, 0.0, 1.0, 0.2, 0.9],
            2,
            vec![1, 1, 1, 2, 2],
        )
        .unwrap();
        let p = sample_profile(&ds, 0, 24, 99).unwrap();
        assert_eq!(p.pos.len(), 24);
        assert_eq!(p.neg.len(), 24);
        let allowed = similarity_profile(&ds, 0).unwrap();
        assert!(p.pos.iter().all(|s| allowed.pos.contains(s)));
        assert!(p.neg.iter().all(|s| allowed.neg.contains(s)));
    }

    #[test]
    fn sampled_single_partner() {
        let ds = four_rows();
        let p = sample_profile(&ds, 1, 1, 3).unwrap();
        assert_eq!(p.pos, vec![ds.similarity(1, 0)]);
    }

    #[test]
    fn sampled_is_deterministic() {
        let ds = four_rows();
        assert_eq!(sample_profile(&ds, 2, 10, 5).unwrap(), sample_profile(&ds, 2, 10, 5).unwrap());
    }

    #[test]
    fn nth_outside_skips_members() {
        // rows 0..7, members {1, 2, 5}: outside = [0, 3, 4, 6]
        let members = [1, 2, 5];
        let outside: Vec<usize> = (0..4).map(|r| nth_outside(&members, r)).collect();
        assert_eq!(outside, vec![0, 3, 4, 6]);
    }
}
