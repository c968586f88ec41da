// Generate the 10 × 12 synthetic benchmark and look at how the injected
// noise shows up in the similarity structure.
//
// ```bash
// cargo run --example synthetic_benchmark
// ```

use sddq::dataset::similarity_profile;
use sddq::stats::{mean, spearman};
use sddq::synth::{generate, SynthConfig};

pub fn run_example() -> sddq::Result<()> {
    let cfg = SynthConfig::benchmark(7);
    let (ds, truth) = generate(&cfg)?;
    println!(
        "{} samples, {} identities, d = {}",
        ds.len(),
        ds.num_identities(),
        ds.dim()
    );

    // cleaner samples sit closer to their classmates
    let mut genuine_mean = Vec::with_capacity(ds.len());
    for i in 0..ds.len() {
        let profile = similarity_profile(&ds, i)?;
        genuine_mean.push(mean(&profile.pos));
    }
    let rho = spearman(&genuine_mean, &truth.truth_quality());
    println!("spearman(mean genuine similarity, -noise) = {rho:.3}");

    let cleanest = (0..ds.len())
        .min_by(|&a, &b| truth.noise_level[a].total_cmp(&truth.noise_level[b]))
        .unwrap();
    let noisiest = (0..ds.len())
        .max_by(|&a, &b| truth.noise_level[a].total_cmp(&truth.noise_level[b]))
        .unwrap();
    for (name, i) in [("cleanest", cleanest), ("noisiest", noisiest)] {
        println!(
            "{name}: sample {i}, noise {:.3}, mean genuine similarity {:.3}",
            truth.noise_level[i], genuine_mean[i]
        );
    }
    assert!(rho > 0.5);
    Ok(())
}

fn main() -> sddq::Result<()> {
    run_example()
}
