// The sorted closed form of the 1-D Wasserstein-1 distance against a
// direct minimisation over couplings.
//
// ```bash
// cargo run --example wasserstein
// ```

use rand::Rng;
use sddq::seeding::rng_from_seed;
use sddq::transport::oracle::wasserstein_oracle;
use sddq::transport::{wasserstein_1d, EmpiricalDistribution};

pub fn run_example() -> sddq::Result<()> {
    let p = EmpiricalDistribution::new(vec![0.2, 0.8])?;
    let q = EmpiricalDistribution::new(vec![0.4, 0.6])?;
    println!("W1({{0.2, 0.8}}, {{0.4, 0.6}}) = {}", wasserstein_1d(&p, &q));

    // unequal sizes go through the CDF integral
    let p = EmpiricalDistribution::new(vec![0.1, 0.9])?;
    let q = EmpiricalDistribution::new(vec![0.5])?;
    println!("W1({{0.1, 0.9}}, {{0.5}}) = {}", wasserstein_1d(&p, &q));

    let mut rng = rng_from_seed(3);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let a: Vec<f64> = (0..rng.random_range(1..=8)).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..rng.random_range(1..=8)).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (p, q) = (EmpiricalDistribution::new(a)?, EmpiricalDistribution::new(b)?);
        worst = worst.max((wasserstein_1d(&p, &q) - wasserstein_oracle(&p, &q)?).abs());
    }
    println!("200 random pairs: max |closed form - coupling optimum| = {worst:e}");
    assert!(worst <= 1e-9);
    Ok(())
}

fn main() -> sddq::Result<()> {
    run_example()
}
