//! The `sddq` command-line front end.
//!
//! Every subcommand writes its primary outputs plus a JSON manifest holding
//! the argument vector, the parsed configuration, all seeds, SHA-256 sums of
//! the inputs and outputs, and the tool version. Primary outputs depend only
//! on flags and inputs, never on the thread count; the manifest's timestamp
//! is the one field that changes between identical runs.
//!
//! Failures print a single `error[<kind>]: <message>` line to stderr and
//! return a nonzero status.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{load_dataset, save_dataset, DatasetFormat, EmbeddingDataset, SamplingConfig};
use crate::error::{Error, Result};
use crate::eval::{self, FnmrDiffOracle, Grid, DEFAULT_AOC_LOWER, DEFAULT_AOC_UPPER};
use crate::labels::{self, LabelMode};
use crate::regressor::{self, RegressorModel, TrainConfig};
use crate::scores;
use crate::stats::spearman;
use crate::synth::{self, SynthConfig};

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "sddq", version, about = "Quality pseudo-labels from similarity distribution distances")]
pub struct Cli {
    /// Worker threads for the parallel stages; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic identity clusters with known per-sample noise.
    Synth(SynthArgs),
    /// Compute quality pseudo-labels for every sample of a dataset.
    Labels(LabelsArgs),
    /// Fit the quality regressor to pseudo-labels.
    Train(TrainArgs),
    /// Score a dataset with a trained regressor.
    Predict(PredictArgs),
    /// Error-versus-reject curves of a quality scorer.
    Evrc(EvrcArgs),
    /// Area over a stored error-versus-reject curve.
    Aoc(AocArgs),
    /// Compare labels with the leave-one-out FNMR oracle.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 10)]
    pub ids: usize,
    #[arg(long, default_value_t = 12)]
    pub per_id: usize,
    #[arg(long, default_value_t = 32)]
    pub dim: usize,
    /// Per-sample noise scale range, `min:max`.
    #[arg(long, default_value = "0.1:1.5", value_parser = parse_range)]
    pub noise: (f64, f64),
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Embedding file format: `binary` or `csv`.
    #[arg(long, default_value = "binary", value_parser = parse_format)]
    pub format: DatasetFormat,
    /// Output directory.
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LabelsArgs {
    /// Embedding file, or a directory holding `embeddings.bin` / `embeddings.csv`.
    pub data: PathBuf,
    /// `sampled` (O(n)) or `exact` (all pairs).
    #[arg(long, default_value = "sampled")]
    pub mode: LabelMode,
    /// Pairs drawn per side in each repeat.
    #[arg(long, default_value_t = SamplingConfig::DEFAULT_M)]
    pub m: usize,
    /// Repeats averaged per sample.
    #[arg(long = "K", default_value_t = SamplingConfig::DEFAULT_K)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Label CSV; the JSON sidecar goes next to it.
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    pub data: PathBuf,
    /// Label CSV from `sddq labels`.
    #[arg(long)]
    pub labels: PathBuf,
    /// Huber transition point.
    #[arg(long, default_value_t = TrainConfig::default().zeta)]
    pub zeta: f64,
    #[arg(long, default_value_t = TrainConfig::default().learning_rate)]
    pub lr: f64,
    #[arg(long, default_value_t = TrainConfig::default().epochs)]
    pub epochs: usize,
    #[arg(long, default_value_t = TrainConfig::default().batch_size)]
    pub batch_size: usize,
    #[arg(long, default_value_t = TrainConfig::default().hidden_width)]
    pub hidden: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Model JSON.
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    pub data: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Score CSV `index,score`.
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvrcArgs {
    pub data: PathBuf,
    /// CSV with `index` and `score` columns (predictions or labels).
    #[arg(long)]
    pub scores: PathBuf,
    /// Fixed false match rate; repeat for several curves.
    #[arg(long = "fmr", default_values_t = eval::DEFAULT_FIXED_FMRS.to_vec())]
    pub fmrs: Vec<f64>,
    /// Rejection ratios, `linear|log:start:end:count`.
    #[arg(long, default_value = "linear:0:0.95:96")]
    pub phi_grid: Grid,
    #[arg(long, default_value_t = DEFAULT_AOC_LOWER)]
    pub a: f64,
    #[arg(long, default_value_t = DEFAULT_AOC_UPPER)]
    pub b: f64,
    /// Name recorded as the curve's quality source; defaults to the score file stem.
    #[arg(long)]
    pub source: Option<String>,
    /// Output directory.
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AocArgs {
    /// Curve CSV `phi,threshold,fnmr`.
    pub curve: PathBuf,
    #[arg(long, default_value_t = DEFAULT_AOC_LOWER)]
    pub a: f64,
    #[arg(long, default_value_t = DEFAULT_AOC_UPPER)]
    pub b: f64,
    /// Also write the result as JSON.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OracleArgs {
    pub data: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// FMR operating points averaged by the oracle.
    #[arg(long, default_value = "log:1e-3:1:20")]
    pub fmr_grid: Grid,
    /// Report JSON.
    #[arg(short, long)]
    pub out: PathBuf,
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("`{s}` is not min:max"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number"));
    Ok((parse(lo)?, parse(hi)?))
}

fn parse_format(s: &str) -> std::result::Result<DatasetFormat, String> {
    match s {
        "binary" => Ok(DatasetFormat::Binary),
        "csv" => Ok(DatasetFormat::Csv),
        other => Err(format!("unknown format `{other}`, expected binary or csv")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
}

impl Artifact {
    pub fn of(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(Self {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name; `run` on them repeats the command.
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub threads: usize,
    pub inputs: Vec<Artifact>,
    pub outputs: Vec<Artifact>,
    pub summary: serde_json::Value,
    pub created_unix: u64,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Where a command's manifest goes: `DIR/manifest.json` for directory
/// outputs, `<stem>.manifest.json` next to a file output.
pub fn manifest_path(out: &Path, out_is_dir: bool) -> PathBuf {
    if out_is_dir {
        out.join("manifest.json")
    } else {
        out.with_extension("manifest.json")
    }
}

/// Report written by `sddq oracle`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub fmr_grid: Grid,
    pub spearman: f64,
    pub samples: Vec<OracleSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSample {
    pub index: usize,
    pub label_score: f64,
    /// Negated FNMR difference: high when removing the sample hurts.
    pub oracle_quality: f64,
}

/// Result file of `sddq aoc -o`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AocResult {
    pub a: f64,
    pub b: f64,
    pub aoc: f64,
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error[usage]: {}", first.trim_start_matches("error: "));
            return 2;
        }
    };
    let argv: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {}", e.kind(), e.to_string().replace('\n', " "));
            1
        }
    }
}

fn execute(cli: &Cli, argv: Vec<String>) -> Result<()> {
    if cli.threads == 0 {
        return dispatch(cli, argv);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?
        .install(|| dispatch(cli, argv))
}

struct Record {
    command: &'static str,
    config: serde_json::Value,
    seeds: BTreeMap<String, u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    summary: serde_json::Value,
    manifest: PathBuf,
}

fn dispatch(cli: &Cli, argv: Vec<String>) -> Result<()> {
    let record = match &cli.command {
        Command::Synth(a) => cmd_synth(a)?,
        Command::Labels(a) => cmd_labels(a)?,
        Command::Train(a) => cmd_train(a)?,
        Command::Predict(a) => cmd_predict(a)?,
        Command::Evrc(a) => cmd_evrc(a)?,
        Command::Aoc(a) => match cmd_aoc(a)? {
            Some(r) => r,
            None => return Ok(()),
        },
        Command::Oracle(a) => cmd_oracle(a)?,
    };
    let hashes = |paths: &[PathBuf]| paths.iter().map(|p| Artifact::of(p)).collect::<Result<Vec<_>>>();
    let manifest = Manifest {
        format_version: MANIFEST_FORMAT_VERSION,
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: record.command.into(),
        argv,
        config: record.config,
        seeds: record.seeds,
        threads: cli.threads,
        inputs: hashes(&record.inputs)?,
        outputs: hashes(&record.outputs)?,
        summary: record.summary,
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    write_json(&record.manifest, &manifest)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").map_err(|e| Error::io(path, e))
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| Error::io(dir, e)),
        _ => Ok(()),
    }
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, "no such file")))
    }
}

/// A directory stands for the `embeddings.bin` (or `.csv`) inside it.
pub fn resolve_dataset(path: &Path) -> Result<PathBuf> {
    if path.is_dir() {
        for name in ["embeddings.bin", "embeddings.csv"] {
            let candidate = path.join(name);
            if candidate.is_file() {
                return Ok(candidate);
            }
        }
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "directory has no embeddings.bin or embeddings.csv"),
        ));
    }
    require_file(path)?;
    Ok(path.to_path_buf())
}

fn open_dataset(path: &Path) -> Result<(PathBuf, EmbeddingDataset)> {
    let file = resolve_dataset(path)?;
    let ds = load_dataset(&file, DatasetFormat::from_path(&file))?;
    Ok((file, ds))
}

fn to_value<T: Serialize>(value: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(value)?)
}

fn seeds(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn check_bounds(a: f64, b: f64) -> Result<()> {
    if (0.0..1.0).contains(&a) && a < b && b <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("AOC bounds must satisfy 0 <= a < b <= 1, got a={a}, b={b}")))
    }
}

fn cmd_synth(args: &SynthArgs) -> Result<Record> {
    let cfg = SynthConfig {
        num_identities: args.ids,
        samples_per_identity: args.per_id,
        dim: args.dim,
        noise_min: args.noise.0,
        noise_max: args.noise.1,
        seed: args.seed,
    };
    cfg.validate()?;
    let (ds, truth) = synth::generate(&cfg)?;
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let data_path = args.out.join(match args.format {
        DatasetFormat::Binary => "embeddings.bin",
        DatasetFormat::Csv => "embeddings.csv",
    });
    save_dataset(&ds, &data_path, args.format)?;
    let truth_path = args.out.join("truth.csv");
    let file = fs::File::create(&truth_path).map_err(|e| Error::io(&truth_path, e))?;
    truth.write_csv(&ds, std::io::BufWriter::new(file))?;
    println!("synth: {} samples, {} identities -> {}", ds.len(), ds.num_identities(), args.out.display());
    Ok(Record {
        command: "synth",
        config: to_value(&cfg)?,
        seeds: seeds(&[("synth", args.seed)]),
        inputs: vec![],
        outputs: vec![data_path, truth_path],
        summary: serde_json::json!({ "num_samples": ds.len() }),
        manifest: manifest_path(&args.out, true),
    })
}

fn cmd_labels(args: &LabelsArgs) -> Result<Record> {
    let cfg = SamplingConfig::new(args.m, args.k, args.seed)?;
    let (data_path, ds) = open_dataset(&args.data)?;
    let quality = labels::generate_labels(&ds, args.mode, &cfg)?;
    ensure_parent(&args.out)?;
    labels::save_labels(&quality, &args.out)?;
    println!(
        "labels: {} scored, {} skipped -> {}",
        quality.entries.len(),
        quality.skipped.len(),
        args.out.display()
    );
    Ok(Record {
        command: "labels",
        config: to_value(args)?,
        seeds: seeds(&[("master_seed", args.seed)]),
        inputs: vec![data_path],
        outputs: vec![args.out.clone(), labels::sidecar_path(&args.out)],
        summary: to_value(&quality.sidecar())?,
        manifest: manifest_path(&args.out, false),
    })
}

fn cmd_train(args: &TrainArgs) -> Result<Record> {
    let cfg = TrainConfig {
        zeta: args.zeta,
        learning_rate: args.lr,
        epochs: args.epochs,
        batch_size: args.batch_size,
        seed: args.seed,
        hidden_width: args.hidden,
    };
    cfg.validate()?;
    require_file(&args.labels)?;
    let (data_path, ds) = open_dataset(&args.data)?;
    let entries = labels::load_label_entries(&args.labels)?;
    let (model, log) = regressor::train(&ds, &entries, &cfg)?;
    ensure_parent(&args.out)?;
    model.save(&args.out, Some(&cfg))?;
    let final_loss = log.epoch_loss.last().copied().unwrap_or(f64::NAN);
    println!("train: {} epochs, final loss {final_loss:.4} -> {}", cfg.epochs, args.out.display());
    Ok(Record {
        command: "train",
        config: to_value(&cfg)?,
        seeds: seeds(&[("train", args.seed)]),
        inputs: vec![data_path, args.labels.clone()],
        outputs: vec![args.out.clone()],
        summary: serde_json::json!({ "epoch_loss": log.epoch_loss }),
        manifest: manifest_path(&args.out, false),
    })
}

fn cmd_predict(args: &PredictArgs) -> Result<Record> {
    require_file(&args.model)?;
    let (data_path, ds) = open_dataset(&args.data)?;
    let (model, train_cfg) = RegressorModel::load(&args.model)?;
    if model.dim() != ds.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            actual: ds.dim(),
        });
    }
    let predicted = regressor::predict(&model, ds.rows())?;
    ensure_parent(&args.out)?;
    scores::save_scores(&predicted, &args.out)?;
    println!("predict: {} scores -> {}", predicted.len(), args.out.display());
    let train_seed = train_cfg.map(|c| c.seed);
    Ok(Record {
        command: "predict",
        config: to_value(args)?,
        seeds: train_seed.map(|s| seeds(&[("train", s)])).unwrap_or_default(),
        inputs: vec![data_path, args.model.clone()],
        outputs: vec![args.out.clone()],
        summary: serde_json::json!({ "num_samples": predicted.len() }),
        manifest: manifest_path(&args.out, false),
    })
}

/// File name of the curve for one fixed FMR, e.g. `evrc_fmr1e-2.csv`.
pub fn curve_file_name(fixed_fmr: f64) -> String {
    format!("evrc_fmr{fixed_fmr:e}.csv")
}

fn cmd_evrc(args: &EvrcArgs) -> Result<Record> {
    check_bounds(args.a, args.b)?;
    if args.fmrs.is_empty() {
        return Err(Error::Config("at least one --fmr is required".into()));
    }
    require_file(&args.scores)?;
    let (data_path, ds) = open_dataset(&args.data)?;
    let quality = scores::load_scores(&args.scores, ds.len())?;
    let source = args.source.clone().unwrap_or_else(|| {
        args.scores
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scores".into())
    });
    let phis = args.phi_grid.values();
    let curves = args
        .fmrs
        .iter()
        .map(|&f| eval::evrc(&ds, &quality, f, &phis, &source))
        .collect::<Result<Vec<_>>>()?;

    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let mut outputs = Vec::new();
    let mut aocs = Vec::new();
    for curve in &curves {
        let path = args.out.join(curve_file_name(curve.fixed_fmr));
        let sidecar = curve.save(&path, args.a, args.b)?;
        match sidecar.aoc {
            Some(v) => println!("evrc: fmr {:e} aoc {v:.6} -> {}", curve.fixed_fmr, path.display()),
            None => println!(
                "evrc: fmr {:e} aoc undefined on [{}, {}], curve ends at phi={} -> {}",
                curve.fixed_fmr,
                args.a,
                args.b,
                curve.points.last().map_or(f64::NAN, |p| p.phi),
                path.display()
            ),
        }
        aocs.push(serde_json::json!({ "fixed_fmr": curve.fixed_fmr, "aoc": sidecar.aoc, "omitted": curve.omitted.len() }));
        outputs.push(path.clone());
        outputs.push(path.with_extension("json"));
    }
    Ok(Record {
        command: "evrc",
        config: to_value(args)?,
        seeds: BTreeMap::new(),
        inputs: vec![data_path, args.scores.clone()],
        outputs,
        summary: serde_json::Value::Array(aocs),
        manifest: manifest_path(&args.out, true),
    })
}

fn cmd_aoc(args: &AocArgs) -> Result<Option<Record>> {
    check_bounds(args.a, args.b)?;
    let points = eval::load_curve_csv(&args.curve)?;
    let value = eval::aoc(&points, args.a, args.b)?;
    println!("{value:?}");
    let Some(out) = &args.out else {
        return Ok(None);
    };
    ensure_parent(out)?;
    write_json(out, &AocResult { a: args.a, b: args.b, aoc: value })?;
    Ok(Some(Record {
        command: "aoc",
        config: to_value(args)?,
        seeds: BTreeMap::new(),
        inputs: vec![args.curve.clone()],
        outputs: vec![out.clone()],
        summary: serde_json::json!({ "aoc": value }),
        manifest: manifest_path(out, false),
    }))
}

fn cmd_oracle(args: &OracleArgs) -> Result<Record> {
    require_file(&args.labels)?;
    let (data_path, ds) = open_dataset(&args.data)?;
    let entries = labels::load_label_entries(&args.labels)?;
    if entries.len() < 2 {
        return Err(Error::Validation("oracle comparison needs at least two labelled samples".into()));
    }
    if let Some(e) = entries.iter().find(|e| e.index >= ds.len()) {
        return Err(Error::Validation(format!("label index {} outside dataset of {}", e.index, ds.len())));
    }
    let grid = args.fmr_grid.values();
    let oracle = FnmrDiffOracle::new(&ds);
    let samples = entries
        .par_iter()
        .map(|e| {
            Ok(OracleSample {
                index: e.index,
                label_score: e.score,
                oracle_quality: oracle.quality(e.index, &grid)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let label_scores: Vec<f64> = samples.iter().map(|s| s.label_score).collect();
    let oracle_scores: Vec<f64> = samples.iter().map(|s| s.oracle_quality).collect();
    let report = OracleReport {
        fmr_grid: args.fmr_grid,
        spearman: spearman(&label_scores, &oracle_scores),
        samples,
    };
    ensure_parent(&args.out)?;
    write_json(&args.out, &report)?;
    println!("oracle: spearman {:.4} over {} samples -> {}", report.spearman, report.samples.len(), args.out.display());
    Ok(Record {
        command: "oracle",
        config: to_value(args)?,
        seeds: BTreeMap::new(),
        inputs: vec![data_path, args.labels.clone()],
        outputs: vec![args.out.clone()],
        summary: serde_json::json!({ "spearman": report.spearman }),
        manifest: manifest_path(&args.out, false),
    })
}
