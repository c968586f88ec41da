// Round trips through every on-disk format: binary and CSV embeddings,
// label CSV with its JSON sidecar, score CSV, curve CSV.
//
// ```bash
// cargo run --example file_formats
// ```

use sddq::dataset::{load_dataset, save_dataset, DatasetFormat, SamplingConfig};
use sddq::eval::{evrc, load_curve_csv};
use sddq::labels::{generate_labels, load_label_entries, save_labels, sidecar_path, LabelMode};
use sddq::scores::{load_scores, save_scores};
use sddq::synth::{generate, SynthConfig};

pub fn run_example() -> sddq::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| sddq::Error::Config(e.to_string()))?;
    let (ds, _) = generate(&SynthConfig {
        num_identities: 4,
        samples_per_identity: 5,
        ..SynthConfig::benchmark(1)
    })?;

    for (name, format) in [("embeddings.bin", DatasetFormat::Binary), ("embeddings.csv", DatasetFormat::Csv)] {
        let path = dir.path().join(name);
        save_dataset(&ds, &path, format)?;
        let back = load_dataset(&path, format)?;
        // values are stored as f32
        let err = ds
            .rows()
            .flatten()
            .zip(back.rows().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let bytes = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
        println!("{name}: {bytes} bytes, max abs change after reload {err:.2e}");
        assert_eq!(back.identities(), ds.identities());
    }

    let labels = generate_labels(&ds, LabelMode::Sampled, &SamplingConfig::default())?;
    let label_path = dir.path().join("labels.csv");
    save_labels(&labels, &label_path)?;
    assert_eq!(load_label_entries(&label_path)?, labels.entries);
    println!("labels.json:\n{}", std::fs::read_to_string(sidecar_path(&label_path)).unwrap_or_default());

    let score_path = dir.path().join("scores.csv");
    save_scores(&labels.scores(), &score_path)?;
    assert_eq!(load_scores(&score_path, ds.len())?, labels.scores());

    let curve = evrc(&ds, &labels.scores(), 0.1, &[0.0, 0.25, 0.5], "labels")?;
    let curve_path = dir.path().join("curve.csv");
    curve.save(&curve_path, 0.0, 0.5)?;
    assert_eq!(load_curve_csv(&curve_path)?, curve.points);
    print!("curve.csv:\n{}", std::fs::read_to_string(&curve_path).unwrap_or_default());
    Ok(())
}

fn main() -> sddq::Result<()> {
    run_example()
}
