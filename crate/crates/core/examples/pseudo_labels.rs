// Exact labels (all pairs) against the sampled estimator (m pairs per side,
// K repeats). The sampled mode costs O(m·K) per sample instead of O(n).
//
// ```bash
// cargo run --example pseudo_labels
// ```

use sddq::dataset::{EmbeddingDataset, SamplingConfig};
use sddq::labels::{generate_labels, LabelMode};
use sddq::stats::spearman;
use sddq::synth::{generate, SynthConfig};

pub fn run_example() -> sddq::Result<()> {
    let (ds, truth) = generate(&SynthConfig::benchmark(7))?;

    let exact = generate_labels(&ds, LabelMode::Exact, &SamplingConfig::default())?;
    let (lo, hi) = exact.raw_range();
    println!("exact: raw distance range [{lo:.4}, {hi:.4}], scaled to [0, 100]");
    println!("exact vs -noise: spearman {:.3}", spearman(&exact.raw(), &truth.truth_quality()));

    for (m, k) in [(24, 12), (200, 64)] {
        let cfg = SamplingConfig::new(m, k, 7)?;
        let sampled = generate_labels(&ds, LabelMode::Sampled, &cfg)?;
        println!(
            "sampled m={m:<3} K={k:<2}: spearman vs exact {:.4}",
            spearman(&sampled.raw(), &exact.raw())
        );
    }

    // a singleton identity cannot be labelled; it is reported, not fatal
    let mut values: Vec<f64> = ds.rows().flatten().copied().collect();
    let mut ids = ds.identities().to_vec();
    values.extend_from_slice(ds.row(0));
    ids.push(999);
    let with_singleton = EmbeddingDataset::new(values, ds.dim(), ids)?;
    let labels = generate_labels(&with_singleton, LabelMode::Exact, &SamplingConfig::default())?;
    println!("with a singleton appended: {} scored, skipped {:?}", labels.entries.len(), labels.skipped);
    assert_eq!(labels.skipped, vec![ds.len()]);
    Ok(())
}

fn main() -> sddq::Result<()> {
    run_example()
}
