//! On-disk embedding formats.
//!
//! Binary layout (all little-endian):
//!
//! ```text
//! "SDDQ" | version: u32 = 1 | n: u64 | d: u32 | n*d f32 row-major | n identity ids: u64
//! ```
//!
//! CSV layout: header `id,e0,...,e{d-1}`, one row per sample.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EmbeddingDataset;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SDDQ";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Binary,
    Csv,
}

impl DatasetFormat {
    /// `.csv` means CSV, anything else is treated as binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => DatasetFormat::Csv,
            _ => DatasetFormat::Binary,
        }
    }
}

pub fn load_dataset(path: &Path, format: DatasetFormat) -> Result<EmbeddingDataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    match format {
        DatasetFormat::Binary => read_binary(reader),
        DatasetFormat::Csv => read_csv(reader),
    }
}

pub fn save_dataset(ds: &EmbeddingDataset, path: &Path, format: DatasetFormat) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    match format {
        DatasetFormat::Binary => write_binary(ds, &mut writer),
        DatasetFormat::Csv => write_csv(ds, &mut writer),
    }
    .and_then(|_| writer.flush().map_err(|e| Error::io(path, e)))
}

fn read_exact<R: Read>(reader: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    reader
        .read_exact(buf)
        .map_err(|e| Error::Format(format!("truncated binary file while reading {what}: {e}")))
}

pub fn read_binary<R: Read>(mut reader: R) -> Result<EmbeddingDataset> {
    let mut magic = [0u8; 4];
    read_exact(&mut reader, &mut magic, "magic")?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic bytes {magic:?}")));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    read_exact(&mut reader, &mut b4, "version")?;
    let version = u32::from_le_bytes(b4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    read_exact(&mut reader, &mut b8, "row count")?;
    let n = usize::try_from(u64::from_le_bytes(b8))
        .map_err(|_| Error::Format("row count does not fit in memory".into()))?;
    read_exact(&mut reader, &mut b4, "dimension")?;
    let d = u32::from_le_bytes(b4) as usize;

    let count = n
        .checked_mul(d)
        .ok_or_else(|| Error::Format("n*d overflows".into()))?;
    let mut raw = Vec::new();
    reader
        .by_ref()
        .take((count as u64) * 4)
        .read_to_end(&mut raw)
        .map_err(|e| Error::Format(format!("reading values: {e}")))?;
    if raw.len() != count * 4 {
        return Err(Error::Format(format!(
            "expected {count} values, file holds {}",
            raw.len() / 4
        )));
    }
    let values: Vec<f64> = raw
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();

    let mut ids = Vec::with_capacity(n);
    for _ in 0..n {
        read_exact(&mut reader, &mut b8, "identity ids")?;
        ids.push(u64::from_le_bytes(b8));
    }
    let mut trailing = [0u8; 1];
    if reader.read(&mut trailing).map_err(|e| Error::Format(e.to_string()))? != 0 {
        return Err(Error::Format("trailing bytes after identity ids".into()));
    }
    EmbeddingDataset::new(values, d, ids)
}

pub fn write_binary<W: Write>(ds: &EmbeddingDataset, writer: &mut W) -> Result<()> {
    let io = |e| Error::io("<binary writer>", e);
    writer.write_all(MAGIC).map_err(io)?;
    writer.write_all(&VERSION.to_le_bytes()).map_err(io)?;
    writer.write_all(&(ds.len() as u64).to_le_bytes()).map_err(io)?;
    writer.write_all(&(ds.dim() as u32).to_le_bytes()).map_err(io)?;
    for row in ds.rows() {
        for &v in row {
            writer.write_all(&(v as f32).to_le_bytes()).map_err(io)?;
        }
    }
    for &id in ds.identities() {
        writer.write_all(&id.to_le_bytes()).map_err(io)?;
    }
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<EmbeddingDataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || &headers[0] != "id" {
        return Err(Error::Format("csv header must start with `id`".into()));
    }
    let d = headers.len() - 1;
    for (k, h) in headers.iter().skip(1).enumerate() {
        if h != format!("e{k}") {
            return Err(Error::Format(format!("csv header column {} is `{h}`, expected `e{k}`", k + 1)));
        }
    }
    let mut values = Vec::new();
    let mut ids = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Format(format!("csv row {row}: {e}")))?;
        if record.len() != d + 1 {
            return Err(Error::Format(format!(
                "csv row {row} has {} fields, expected {}",
                record.len(),
                d + 1
            )));
        }
        let id: u64 = record[0]
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("csv row {row}: bad identity `{}`", &record[0])))?;
        ids.push(id);
        for field in record.iter().skip(1) {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("csv row {row}: bad value `{field}`")))?;
            values.push(v);
        }
    }
    EmbeddingDataset::new(values, d, ids)
}

pub fn write_csv<W: Write>(ds: &EmbeddingDataset, writer: &mut W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["id".to_string()];
    header.extend((0..ds.dim()).map(|k| format!("e{k}")));
    wtr.write_record(&header)?;
    for (i, row) in ds.rows().enumerate() {
        let mut rec = Vec::with_capacity(ds.dim() + 1);
        rec.push(ds.identity(i).to_string());
        rec.extend(row.iter().map(|v| v.to_string()));
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}
