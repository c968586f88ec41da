// Error-versus-reject curves: drop the lowest-quality fraction φ of the
// samples, re-fix the threshold at the target FMR on what is left, and
// watch the FNMR. A useful scorer makes the curve fall fast.
//
// ```bash
// cargo run --example evrc_aoc
// ```

use rand::Rng;
use sddq::dataset::SamplingConfig;
use sddq::eval::{evrc, shared_upper_bound, Grid, DEFAULT_AOC_LOWER, DEFAULT_AOC_UPPER};
use sddq::labels::{generate_labels, LabelMode};
use sddq::seeding::rng_from_seed;
use sddq::synth::{generate, SynthConfig};

pub fn run_example() -> sddq::Result<()> {
    let (ds, truth) = generate(&SynthConfig::benchmark(7))?;
    let labels = generate_labels(&ds, LabelMode::Sampled, &SamplingConfig::new(24, 12, 7)?)?;
    let mut rng = rng_from_seed(11);
    let random: Vec<f64> = (0..ds.len()).map(|_| rng.random()).collect();

    let phis = "linear:0:0.95:96".parse::<Grid>()?.values();
    let fixed_fmr = 1e-2;
    let curves = [
        evrc(&ds, &labels.scores(), fixed_fmr, &phis, "labels")?,
        evrc(&ds, &truth.truth_quality(), fixed_fmr, &phis, "truth")?,
        evrc(&ds, &random, fixed_fmr, &phis, "random")?,
    ];
    // small sets can lose the last few φ when no genuine pair survives
    let b = shared_upper_bound(&curves, DEFAULT_AOC_UPPER);

    println!("FMR = {fixed_fmr}, AOC over [{DEFAULT_AOC_LOWER}, {b}]");
    println!("{:<8} {:>8} {:>8} {:>8} {:>8}", "scorer", "φ=0", "φ=0.2", "φ=0.5", "AOC");
    for c in &curves {
        let at = |phi: f64| c.fnmr_at(phi).map_or("-".to_string(), |v| format!("{v:.4}"));
        println!(
            "{:<8} {:>8} {:>8} {:>8} {:>8.4}",
            c.quality_source,
            at(0.0),
            at(0.2),
            at(0.5),
            c.aoc(DEFAULT_AOC_LOWER, b)?
        );
    }
    assert!(curves[0].aoc(0.0, b)? > curves[2].aoc(0.0, b)?);
    Ok(())
}

fn main() -> sddq::Result<()> {
    run_example()
}
