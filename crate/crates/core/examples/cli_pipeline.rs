// The whole pipeline through the command-line entry point, in a scratch
// directory: synthetic data, labels, regressor, predictions, curves, AOC
// and the oracle comparison.
//
// ```bash
// cargo run --example cli_pipeline
// ```

use sddq::cli::{run, Manifest, OracleReport};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let p = |name: &str| dir.path().join(name).display().to_string();

    let steps: Vec<Vec<String>> = vec![
        vec!["synth", "--ids", "10", "--per-id", "12", "--dim", "32", "--noise", "0.1:1.5", "--seed", "7", "-o", &p("data")],
        vec!["labels", "--mode", "sampled", "--m", "24", "--K", "12", "--seed", "7", &p("data"), "-o", &p("labels.csv")],
        vec!["train", &p("data"), "--labels", &p("labels.csv"), "--seed", "7", "-o", &p("model.json")],
        vec!["predict", &p("data"), "--model", &p("model.json"), "-o", &p("scores.csv")],
        vec!["evrc", &p("data"), "--scores", &p("labels.csv"), "-o", &p("curves")],
        vec!["aoc", &p("curves/evrc_fmr1e-2.csv"), "--a", "0", "--b", "0.95"],
        vec!["oracle", &p("data"), "--labels", &p("labels.csv"), "--fmr-grid", "log:1e-3:1:20", "-o", &p("report.json")],
    ]
    .into_iter()
    .map(|s| s.into_iter().map(String::from).collect())
    .collect();

    for step in &steps {
        let status = run(std::iter::once("sddq".to_string()).chain(step.iter().cloned()));
        if status != 0 {
            return Err(format!("`sddq {}` exited with {status}", step.join(" ")).into());
        }
    }

    let report: OracleReport = serde_json::from_str(&std::fs::read_to_string(p("report.json"))?)?;
    println!("oracle spearman: {:.3}", report.spearman);
    let manifest = Manifest::load(&dir.path().join("labels.manifest.json"))?;
    println!("labels manifest seeds: {:?}", manifest.seeds);
    for out in &manifest.outputs {
        println!("  {} {}", &out.sha256[..16], out.path);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
