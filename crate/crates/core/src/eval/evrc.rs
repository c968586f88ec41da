//! Error-versus-reject curves and the area over them.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fnmr, threshold_at_fmr, PairPool};
use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvrcPoint {
    /// Fraction of samples rejected.
    pub phi: f64,
    pub threshold: f64,
    pub fnmr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvrcCurve {
    pub fixed_fmr: f64,
    /// Ascending in `phi`.
    pub points: Vec<EvrcPoint>,
    pub quality_source: String,
    /// One message per requested rejection ratio that had to be dropped.
    pub omitted: Vec<String>,
}

impl EvrcCurve {
    pub fn aoc(&self, a: f64, b: f64) -> Result<f64> {
        aoc(&self.points, a, b)
    }

    pub fn fnmr_at(&self, phi: f64) -> Option<f64> {
        self.points.iter().find(|p| p.phi == phi).map(|p| p.fnmr)
    }
}

/// Number of samples kept at rejection ratio `phi`: `ceil((1 - phi) * n)`.
/// A 1e-9 slack absorbs rounding in `(1 - phi) * n` so that e.g. 5% of 120
/// keeps 6 samples, not 7.
pub fn kept_count(n: usize, phi: f64) -> usize {
    (((1.0 - phi) * n as f64 - 1e-9).ceil().max(0.0) as usize).min(n)
}

/// Rejects the lowest-scoring fraction `phi` of samples (ties: higher index
/// rejected first), re-derives the threshold for `fixed_fmr` on the pairs
/// among the survivors and records the FNMR there.
pub fn evrc(
    ds: &EmbeddingDataset,
    scores: &[f64],
    fixed_fmr: f64,
    phi_grid: &[f64],
    quality_source: &str,
) -> Result<EvrcCurve> {
    if scores.len() != ds.len() {
        return Err(Error::DimensionMismatch {
            expected: ds.len(),
            actual: scores.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Validation("quality scores must be finite".into()));
    }
    if !(fixed_fmr > 0.0 && fixed_fmr <= 1.0) {
        return Err(Error::Config(format!("fixed FMR {fixed_fmr} outside (0, 1]")));
    }
    let mut phis = phi_grid.to_vec();
    if let Some(bad) = phis.iter().find(|p| !(0.0..1.0).contains(*p)) {
        return Err(Error::Config(format!("rejection ratio {bad} outside [0, 1)")));
    }
    phis.sort_by(f64::total_cmp);
    phis.dedup();

    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));
    let gram = ds.gram();

    let results: Vec<std::result::Result<EvrcPoint, String>> = phis
        .par_iter()
        .map(|&phi| {
            let keep = kept_count(ds.len(), phi);
            if keep < 2 {
                return Err(format!("phi={phi}: only {keep} sample(s) kept"));
            }
            let mut members = order[..keep].to_vec();
            members.sort_unstable();
            let pool = PairPool::from_gram(&gram, ds.identities(), &members, format!("top {keep} by {quality_source}"));
            if pool.pos().is_empty() || pool.neg().is_empty() {
                return Err(format!("phi={phi}: no genuine or no impostor pairs among {keep} kept samples"));
            }
            let threshold = threshold_at_fmr(&pool, fixed_fmr).map_err(|e| e.to_string())?;
            let fnmr = fnmr(&pool, threshold).map_err(|e| e.to_string())?;
            Ok(EvrcPoint { phi, threshold, fnmr })
        })
        .collect();

    let mut points = Vec::new();
    let mut omitted = Vec::new();
    for r in results {
        match r {
            Ok(p) => points.push(p),
            Err(msg) => omitted.push(msg),
        }
    }
    Ok(EvrcCurve {
        fixed_fmr,
        points,
        quality_source: quality_source.to_string(),
        omitted,
    })
}

const EDGE_TOL: f64 = 1e-12;

fn interpolate(points: &[EvrcPoint], x: f64) -> f64 {
    let k = points.partition_point(|p| p.phi < x);
    if k < points.len() && (points[k].phi - x).abs() <= EDGE_TOL {
        return points[k].fnmr;
    }
    if k == 0 {
        return points[0].fnmr;
    }
    if k == points.len() {
        return points[k - 1].fnmr;
    }
    let (l, r) = (points[k - 1], points[k]);
    l.fnmr + (r.fnmr - l.fnmr) * (x - l.phi) / (r.phi - l.phi)
}

/// `1 - ∫_a^b g(φ) dφ` by the trapezoidal rule over the curve's own points,
/// with `g` linearly interpolated at `a` and `b`.
pub fn aoc(points: &[EvrcPoint], a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::Config(format!("AOC bounds need a < b (a={a}, b={b})")));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| p.phi.total_cmp(&q.phi));
    let inside = pts
        .iter()
        .filter(|p| p.phi >= a - EDGE_TOL && p.phi <= b + EDGE_TOL)
        .count();
    if inside < 2 {
        return Err(Error::Validation(format!(
            "curve has {inside} point(s) in [{a}, {b}], need at least 2"
        )));
    }
    if pts[0].phi > a + EDGE_TOL || pts[pts.len() - 1].phi < b - EDGE_TOL {
        return Err(Error::Validation(format!(
            "curve spans [{}, {}], which does not cover [{a}, {b}]",
            pts[0].phi,
            pts[pts.len() - 1].phi
        )));
    }
    let mut xs = vec![(a, interpolate(&pts, a))];
    xs.extend(
        pts.iter()
            .filter(|p| p.phi > a + EDGE_TOL && p.phi < b - EDGE_TOL)
            .map(|p| (p.phi, p.fnmr)),
    );
    xs.push((b, interpolate(&pts, b)));
    let area: f64 = xs
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum();
    Ok(1.0 - area)
}

/// Largest upper bound `<= b` that every curve reaches. Tail points vanish
/// when too few samples survive to form a genuine pair, so comparing scorers
/// by AOC needs a bound they all cover.
pub fn shared_upper_bound<'a>(curves: impl IntoIterator<Item = &'a EvrcCurve>, b: f64) -> f64 {
    curves
        .into_iter()
        .filter_map(|c| c.points.iter().map(|p| p.phi).max_by(f64::total_cmp))
        .fold(b, f64::min)
}

/// JSON companion of a curve CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSidecar {
    pub format_version: u32,
    pub fixed_fmr: f64,
    pub a: f64,
    pub b: f64,
    pub aoc: Option<f64>,
    pub quality_source: String,
    pub omitted: Vec<String>,
}

pub fn write_curve_csv<W: Write>(points: &[EvrcPoint], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["phi", "threshold", "fnmr"])?;
    for p in points {
        wtr.write_record([p.phi.to_string(), p.threshold.to_string(), p.fnmr.to_string()])?;
    }
    wtr.flush().map_err(|e| Error::io("<curve csv>", e))?;
    Ok(())
}

pub fn read_curve_csv<R: Read>(reader: R) -> Result<Vec<EvrcPoint>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["phi", "threshold", "fnmr"] {
        return Err(Error::Format(format!("unexpected curve csv header {headers:?}")));
    }
    let mut points = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let mut vals = [0.0; 3];
        for (k, v) in vals.iter_mut().enumerate() {
            *v = record
                .get(k)
                .and_then(|f| f.trim().parse().ok())
                .ok_or_else(|| Error::Format(format!("curve row {row}: bad field {k}")))?;
        }
        points.push(EvrcPoint {
            phi: vals[0],
            threshold: vals[1],
            fnmr: vals[2],
        });
    }
    Ok(points)
}

pub fn load_curve_csv(path: &Path) -> Result<Vec<EvrcPoint>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_curve_csv(BufReader::new(file))
}

impl EvrcCurve {
    /// Writes `path` (CSV) and a JSON sidecar with the same stem.
    pub fn save(&self, path: &Path, a: f64, b: f64) -> Result<CurveSidecar> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        write_curve_csv(&self.points, BufWriter::new(file))?;
        let sidecar = CurveSidecar {
            format_version: 1,
            fixed_fmr: self.fixed_fmr,
            a,
            b,
            aoc: self.aoc(a, b).ok(),
            quality_source: self.quality_source.clone(),
            omitted: self.omitted.clone(),
        };
        let json_path = path.with_extension("json");
        std::fs::write(&json_path, serde_json::to_string_pretty(&sidecar)? + "\n")
            .map_err(|e| Error::io(&json_path, e))?;
        Ok(sidecar)
    }
}
