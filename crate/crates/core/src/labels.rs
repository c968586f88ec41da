//! Quality pseudo-labels: the Wasserstein-1 distance between a sample's
//! genuine and impostor similarity distributions, min-max scaled to [0, 100]
//! over the dataset.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{sample_profile, similarity_profile, EmbeddingDataset, SamplingConfig};
use crate::error::{Error, Result};
use crate::seeding::derive_seed;
use crate::transport::{wasserstein_1d, EmpiricalDistribution};

pub const SCORE_MIN: f64 = 0.0;
pub const SCORE_MAX: f64 = 100.0;
/// Score given to every sample when all raw distances coincide.
pub const DEGENERATE_SCORE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelMode {
    /// All pairs in the dataset, O(n) per sample.
    Exact,
    /// `K` repeats of `m` sampled pairs per side, O(m·K) per sample.
    Sampled,
}

impl std::str::FromStr for LabelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(LabelMode::Exact),
            "sampled" => Ok(LabelMode::Sampled),
            other => Err(Error::Config(format!("unknown label mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub index: usize,
    pub identity: u64,
    pub raw: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityLabels {
    pub mode: LabelMode,
    /// `None` for exact mode.
    pub sampling: Option<SamplingConfig>,
    /// One entry per scored sample, ascending by index.
    pub entries: Vec<LabelEntry>,
    /// Samples without a label (singleton identities).
    pub skipped: Vec<usize>,
}

impl QualityLabels {
    pub fn raw(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.raw).collect()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.score).collect()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.index).collect()
    }

    pub fn raw_range(&self) -> (f64, f64) {
        self.entries.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
            (lo.min(e.raw), hi.max(e.raw))
        })
    }

    /// Scores laid out by sample index (length `n`), `None` where skipped.
    pub fn score_by_index(&self, n: usize) -> Vec<Option<f64>> {
        let mut out = vec![None; n];
        for e in &self.entries {
            if e.index < n {
                out[e.index] = Some(e.score);
            }
        }
        out
    }

    pub fn sidecar(&self) -> LabelSidecar {
        let (raw_min, raw_max) = self.raw_range();
        LabelSidecar {
            format_version: 1,
            mode: self.mode,
            m: self.sampling.map(|c| c.m),
            k: self.sampling.map(|c| c.k),
            master_seed: self.sampling.map(|c| c.master_seed),
            skipped: self.skipped.clone(),
            raw_min,
            raw_max,
            num_scored: self.entries.len(),
        }
    }
}

/// JSON companion of a label CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelSidecar {
    pub format_version: u32,
    pub mode: LabelMode,
    pub m: Option<usize>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub master_seed: Option<u64>,
    pub skipped: Vec<usize>,
    pub raw_min: f64,
    pub raw_max: f64,
    pub num_scored: usize,
}

pub fn exact_raw_quality(ds: &EmbeddingDataset, i: usize) -> Result<f64> {
    let profile = similarity_profile(ds, i)?;
    if profile.neg.is_empty() {
        return Err(Error::NoNegativePairs { index: i });
    }
    Ok(wasserstein_1d(
        &EmpiricalDistribution::new(profile.pos)?,
        &EmpiricalDistribution::new(profile.neg)?,
    ))
}

/// Mean of `K` distances, each over a fresh draw of `m` pairs per side. The
/// draw for repeat `k` is seeded by `(master_seed, i, k)`.
pub fn sampled_raw_quality(ds: &EmbeddingDataset, i: usize, cfg: &SamplingConfig) -> Result<f64> {
    cfg.validate()?;
    let mut total = 0.0;
    for k in 0..cfg.k {
        let profile = sample_profile(ds, i, cfg.m, derive_seed(cfg.master_seed, i as u64, k as u64))?;
        total += wasserstein_1d(
            &EmpiricalDistribution::new(profile.pos)?,
            &EmpiricalDistribution::new(profile.neg)?,
        );
    }
    Ok(total / cfg.k as f64)
}

/// Min-max scaling onto [0, 100]; a constant input maps to 50 everywhere.
pub fn normalize_scores(raw: &[f64]) -> Result<Vec<f64>> {
    if raw.is_empty() {
        return Err(Error::EmptyInput("no raw quality values to normalize"));
    }
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Validation("raw quality values must be finite".into()));
    }
    if hi == lo {
        return Ok(vec![DEGENERATE_SCORE; raw.len()]);
    }
    let span = hi - lo;
    Ok(raw
        .iter()
        .map(|&l| ((l - lo) / span * SCORE_MAX).clamp(SCORE_MIN, SCORE_MAX))
        .collect())
}

/// Labels every sample whose identity has at least two members; singletons
/// are reported in `skipped`. Per-sample work runs on the current rayon pool.
pub fn generate_labels(ds: &EmbeddingDataset, mode: LabelMode, cfg: &SamplingConfig) -> Result<QualityLabels> {
    if ds.num_identities() < 2 {
        return Err(Error::Validation("label generation needs at least two identities".into()));
    }
    if mode == LabelMode::Sampled {
        cfg.validate()?;
    }
    let (eligible, skipped): (Vec<usize>, Vec<usize>) = (0..ds.len()).partition(|&i| ds.class_size(i) >= 2);
    if eligible.is_empty() {
        return Err(Error::Validation("no identity has two or more samples".into()));
    }
    let raw: Vec<f64> = eligible
        .par_iter()
        .map(|&i| match mode {
            LabelMode::Exact => exact_raw_quality(ds, i),
            LabelMode::Sampled => sampled_raw_quality(ds, i, cfg),
        })
        .collect::<Result<_>>()?;
    let scores = normalize_scores(&raw)?;
    let entries = eligible
        .iter()
        .zip(raw.iter().zip(&scores))
        .map(|(&index, (&raw, &score))| LabelEntry {
            index,
            identity: ds.identity(index),
            raw,
            score,
        })
        .collect();
    Ok(QualityLabels {
        mode,
        sampling: (mode == LabelMode::Sampled).then_some(*cfg),
        entries,
        skipped,
    })
}

pub fn write_labels_csv<W: Write>(labels: &QualityLabels, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["index", "identity", "raw_wd", "score"])?;
    for e in &labels.entries {
        wtr.write_record([
            e.index.to_string(),
            e.identity.to_string(),
            e.raw.to_string(),
            e.score.to_string(),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<labels csv>", e))?;
    Ok(())
}

pub fn read_labels_csv<R: Read>(reader: R) -> Result<Vec<LabelEntry>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["index", "identity", "raw_wd", "score"] {
        return Err(Error::Format(format!("unexpected label csv header {headers:?}")));
    }
    let mut out = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let field = |k: usize| -> Result<&str> {
            record
                .get(k)
                .ok_or_else(|| Error::Format(format!("label row {row} is short")))
        };
        let parse_err = |what: &str| Error::Format(format!("label row {row}: bad {what}"));
        out.push(LabelEntry {
            index: field(0)?.parse().map_err(|_| parse_err("index"))?,
            identity: field(1)?.parse().map_err(|_| parse_err("identity"))?,
            raw: field(2)?.parse().map_err(|_| parse_err("raw_wd"))?,
            score: field(3)?.parse().map_err(|_| parse_err("score"))?,
        });
    }
    Ok(out)
}

/// Writes `path` (CSV) and its JSON sidecar at `path` with a `.json` extension.
pub fn save_labels(labels: &QualityLabels, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_labels_csv(labels, BufWriter::new(file))?;
    let sidecar = sidecar_path(path);
    let json = serde_json::to_string_pretty(&labels.sidecar())?;
    std::fs::write(&sidecar, json + "\n").map_err(|e| Error::io(&sidecar, e))
}

pub fn load_label_entries(path: &Path) -> Result<Vec<LabelEntry>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_labels_csv(std::io::BufReader::new(file))
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    path.with_extension("json")
}
