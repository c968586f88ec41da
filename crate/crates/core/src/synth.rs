//! Synthetic identity clusters on the unit sphere with known per-sample
//! corruption.
//!
//! Each identity gets a uniformly random unit center. Sample `i` of that
//! identity is `normalize(center + σ_i · g)` with `g ~ N(0, I/d)` and
//! `σ_i ~ U[noise_min, noise_max]`. The `1/d` variance keeps `E‖g‖² = 1`, so
//! `σ_i` is the noise-to-signal norm ratio whatever the dimension. The
//! injected `σ_i` is the ground truth: quality is `-σ_i`.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::seeding::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub num_identities: usize,
    pub samples_per_identity: usize,
    pub dim: usize,
    pub noise_min: f64,
    pub noise_max: f64,
    pub seed: u64,
}

impl SynthConfig {
    /// The 10 × 12, d = 32, noise in [0.1, 1.5] benchmark used throughout the
    /// tests and examples.
    pub fn benchmark(seed: u64) -> Self {
        Self {
            num_identities: 10,
            samples_per_identity: 12,
            dim: 32,
            noise_min: 0.1,
            noise_max: 1.5,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_identities < 2 {
            return Err(Error::Config("num_identities must be >= 2".into()));
        }
        if self.samples_per_identity < 2 {
            return Err(Error::Config("samples_per_identity must be >= 2".into()));
        }
        if self.dim < 2 {
            return Err(Error::Config("dim must be >= 2".into()));
        }
        if !(self.noise_min >= 0.0 && self.noise_min <= self.noise_max && self.noise_max.is_finite()) {
            return Err(Error::Config(format!(
                "noise range [{}, {}] must satisfy 0 <= min <= max < inf",
                self.noise_min, self.noise_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub noise_level: Vec<f64>,
}

impl SynthTruth {
    /// Higher is better: the negated noise scale.
    pub fn truth_quality(&self) -> Vec<f64> {
        self.noise_level.iter().map(|s| -s).collect()
    }

    pub fn write_csv<W: Write>(&self, ds: &EmbeddingDataset, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["index", "identity", "noise", "truth_quality"])?;
        for (i, &noise) in self.noise_level.iter().enumerate() {
            wtr.write_record([
                i.to_string(),
                ds.identity(i).to_string(),
                noise.to_string(),
                (-noise).to_string(),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<truth csv>", e))?;
        Ok(())
    }
}

fn gaussian_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Rows are grouped by identity: identity `k` owns rows
/// `k*per_id .. (k+1)*per_id`, with identity id `k`.
pub fn generate(cfg: &SynthConfig) -> Result<(EmbeddingDataset, SynthTruth)> {
    cfg.validate()?;
    let mut rng = rng_from_seed(cfg.seed);
    let coord_scale = 1.0 / (cfg.dim as f64).sqrt();
    let centers: Vec<Vec<f64>> = (0..cfg.num_identities)
        .map(|_| normalized(gaussian_vector(&mut rng, cfg.dim)))
        .collect();

    let n = cfg.num_identities * cfg.samples_per_identity;
    let mut values = Vec::with_capacity(n * cfg.dim);
    let mut ids = Vec::with_capacity(n);
    let mut noise_level = Vec::with_capacity(n);
    for (id, center) in centers.iter().enumerate() {
        for _ in 0..cfg.samples_per_identity {
            let sigma = if cfg.noise_max > cfg.noise_min {
                rng.random_range(cfg.noise_min..=cfg.noise_max)
            } else {
                cfg.noise_min
            };
            let g = gaussian_vector(&mut rng, cfg.dim);
            values.extend(center.iter().zip(&g).map(|(c, z)| c + sigma * coord_scale * z));
            ids.push(id as u64);
            noise_level.push(sigma);
        }
    }
    let ds = EmbeddingDataset::new(values, cfg.dim, ids)?;
    Ok((ds, SynthTruth { noise_level }))
}
