// Checks the distance labels against what they are meant to predict: how
// much the verification FNMR moves when a single sample is left out.
//
// ```bash
// cargo run --example fnmr_oracle
// ```

use sddq::eval::{FnmrDiffOracle, DEFAULT_ORACLE_GRID};
use sddq::labels::exact_raw_quality;
use sddq::stats::spearman;
use sddq::synth::{generate, SynthConfig};

pub fn run_example() -> sddq::Result<()> {
    let (ds, _) = generate(&SynthConfig::benchmark(7))?;
    let grid = DEFAULT_ORACLE_GRID.values();
    let oracle = FnmrDiffOracle::new(&ds);

    let mut labels = Vec::with_capacity(ds.len());
    let mut oracle_quality = Vec::with_capacity(ds.len());
    for i in 0..ds.len() {
        labels.push(exact_raw_quality(&ds, i)?);
        oracle_quality.push(oracle.quality(i, &grid)?);
    }
    let worst = (0..ds.len()).min_by(|&a, &b| oracle_quality[a].total_cmp(&oracle_quality[b])).unwrap();
    println!(
        "removing sample {worst} lowers the grid-averaged FNMR by {:.5}",
        -oracle_quality[worst]
    );
    let rho = spearman(&labels, &oracle_quality);
    println!("spearman(labels, leave-one-out oracle) over {} FMR points = {rho:.3}", grid.len());
    assert!(rho > 0.5);
    Ok(())
}

fn main() -> sddq::Result<()> {
    run_example()
}
