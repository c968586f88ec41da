//! Exact Wasserstein-1 distance between 1-D empirical distributions.
//!
//! For uniform weights the optimal coupling under cost `|x - y|` is the
//! monotone (sorted) matching, so no solver is needed: equal sample counts
//! reduce to the mean absolute difference of order statistics, and unequal
//! counts to the integral of `|F_p - F_q|` over the merged breakpoints.
//! [`oracle`] solves the same problem by direct coupling search and exists
//! to check this shortcut.

pub mod oracle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use oracle::wasserstein_oracle;

/// A nonempty multiset of finite reals carrying uniform weights. Values are
/// kept sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("empirical distribution has no values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("empirical distribution contains a non-finite value".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Values in ascending order.
    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }

    /// Same distribution shifted by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            sorted: self.sorted.iter().map(|v| v + c).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.sorted.iter().map(|v| v * c).collect())
    }
}

impl TryFrom<Vec<f64>> for EmpiricalDistribution {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<EmpiricalDistribution> for Vec<f64> {
    fn from(d: EmpiricalDistribution) -> Self {
        d.sorted
    }
}

pub fn wasserstein_1d(p: &EmpiricalDistribution, q: &EmpiricalDistribution) -> f64 {
    let (a, b) = (p.sorted_values(), q.sorted_values());
    if a.len() == b.len() {
        let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
        return sum / a.len() as f64;
    }
    cdf_gap_integral(a, b)
}

/// Convenience wrapper for raw slices, validating them first.
pub fn wasserstein_1d_values(p: &[f64], q: &[f64]) -> Result<f64> {
    Ok(wasserstein_1d(
        &EmpiricalDistribution::from_slice(p)?,
        &EmpiricalDistribution::from_slice(q)?,
    ))
}

// ∫ |F_a - F_b| dx for sorted inputs. CDF values are tracked as integer
// counts and compared on the common denominator |a|·|b|.
fn cdf_gap_integral(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as i64, b.len() as i64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = a[0].min(b[0]);
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        let gap = (i as i64 * nb - j as i64 * na).unsigned_abs() as f64;
        total += gap * (next - prev);
        prev = next;
        while i < a.len() && a[i] == next {
            i += 1;
        }
        while j < b.len() && b[j] == next {
            j += 1;
        }
    }
    total / (na * nb) as f64
}
