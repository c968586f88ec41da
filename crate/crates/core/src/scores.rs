//! Per-sample quality score files: CSV with an `index` column and a `score`
//! column. Label files qualify as well, their extra columns are ignored.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Writes `index,score`, one row per entry of `scores`.
pub fn write_scores_csv<W: Write>(scores: &[f64], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["index", "score"])?;
    for (i, s) in scores.iter().enumerate() {
        wtr.write_record([i.to_string(), s.to_string()])?;
    }
    wtr.flush().map_err(|e| Error::io("<scores csv>", e))?;
    Ok(())
}

/// Reads a dense score vector for `n` samples. Every index in `0..n` must
/// appear exactly once.
pub fn read_scores_csv<R: Read>(reader: R, n: usize) -> Result<Vec<f64>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Format(format!("score csv has no `{name}` column")))
    };
    let (index_col, score_col) = (column("index")?, column("score")?);
    let mut scores = vec![None; n];
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let index: usize = record
            .get(index_col)
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| Error::Format(format!("score row {row}: bad index")))?;
        let score: f64 = record
            .get(score_col)
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| Error::Format(format!("score row {row}: bad score")))?;
        let slot = scores
            .get_mut(index)
            .ok_or_else(|| Error::Validation(format!("score index {index} outside dataset of {n}")))?;
        if slot.replace(score).is_some() {
            return Err(Error::Validation(format!("score index {index} appears twice")));
        }
    }
    let missing: Vec<usize> = (0..n).filter(|&i| scores[i].is_none()).collect();
    if !missing.is_empty() {
        return Err(Error::Validation(format!(
            "{} sample(s) have no score, first is {}",
            missing.len(),
            missing[0]
        )));
    }
    Ok(scores.into_iter().flatten().collect())
}

pub fn save_scores(scores: &[f64], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_scores_csv(scores, BufWriter::new(file))
}

pub fn load_scores(path: &Path, n: usize) -> Result<Vec<f64>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_scores_csv(BufReader::new(file), n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let scores = [12.5, 0.0, 100.0, 1.0 / 3.0];
        let mut buf = Vec::new();
        write_scores_csv(&scores, &mut buf).unwrap();
        assert_eq!(read_scores_csv(buf.as_slice(), 4).unwrap(), scores);
    }

    #[test]
    fn accepts_label_files_in_any_order() {
        let text = "index,identity,raw_wd,score\n1,0,0.2,10\n0,0,0.5,90\n";
        assert_eq!(read_scores_csv(text.as_bytes(), 2).unwrap(), vec![90.0, 10.0]);
    }

    #[test]
    fn rejects_gaps_and_duplicates() {
        assert!(read_scores_csv("index,score\n0,1\n".as_bytes(), 2).is_err());
        assert!(read_scores_csv("index,score\n0,1\n0,2\n1,3\n".as_bytes(), 2).is_err());
        assert!(read_scores_csv("index,score\n5,1\n".as_bytes(), 2).is_err());
        assert!(read_scores_csv("idx,score\n0,1\n".as_bytes(), 1).is_err());
    }
}
