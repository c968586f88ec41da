#![allow(dead_code)]

use rand::Rng;
use sddq::dataset::EmbeddingDataset;
use sddq::regressor::{loss_gradient, mean_loss, RegressorModel};
use sddq::seeding::rng_from_seed;

/// Copy of `ds` with row `i` replaced (and renormalized on construction).
pub fn with_row(ds: &EmbeddingDataset, i: usize, row: &[f64]) -> EmbeddingDataset {
    let mut values: Vec<f64> = ds.rows().flatten().copied().collect();
    values[i * ds.dim()..(i + 1) * ds.dim()].copy_from_slice(row);
    EmbeddingDataset::new(values, ds.dim(), ds.identities().to_vec()).unwrap()
}

/// Largest per-coordinate relative gap between the analytic gradient and
/// central differences over 20 random `d=3, h=4` models with batches of 5.
/// Batches with a residual within `1e-4` of the Huber kink are redrawn.
pub struct GradientCheck {
    pub worst_relative_error: f64,
    pub coordinates: usize,
    pub redrawn: usize,
}

pub fn gradient_check(seed: u64) -> GradientCheck {
    const STEP: f64 = 1e-5;
    const KINK: f64 = 1e-4;
    let zeta = 1.0;
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0f64;
    let mut coordinates = 0;
    let mut redrawn = 0;
    for _ in 0..20 {
        let mut model = RegressorModel::init(3, 4, &mut rng);
        model.input_mean = (0..3).map(|_| rng.random_range(-0.5..0.5)).collect();
        model.input_std = (0..3).map(|_| rng.random_range(0.5..2.0)).collect();
        let mut p = model.parameters();
        p.iter_mut().for_each(|w| *w += rng.random_range(-0.5..0.5));
        model.set_parameters(&p);

        let xs: Vec<Vec<f64>> = (0..5).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let targets: Vec<f64> = loop {
            let t: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
            let near_kink = xs
                .iter()
                .zip(&t)
                .any(|(x, t)| ((t - model.forward(x).unwrap()).abs() - zeta).abs() < KINK);
            if !near_kink {
                break t;
            }
            redrawn += 1;
        };
        let batch: Vec<(&[f64], f64)> = xs.iter().map(|x| x.as_slice()).zip(targets.iter().copied()).collect();

        let analytic = loss_gradient(&model, &batch, zeta).0;
        let base = model.parameters();
        for k in 0..base.len() {
            let mut probe = model.clone();
            let mut q = base.clone();
            q[k] = base[k] + STEP;
            probe.set_parameters(&q);
            let up = mean_loss(&probe, &batch, zeta);
            q[k] = base[k] - STEP;
            probe.set_parameters(&q);
            let down = mean_loss(&probe, &batch, zeta);
            let numeric = (up - down) / (2.0 * STEP);
            let scale = analytic[k].abs().max(numeric.abs()).max(1e-8);
            worst = worst.max((analytic[k] - numeric).abs() / scale);
            coordinates += 1;
        }
    }
    GradientCheck {
        worst_relative_error: worst,
        coordinates,
        redrawn,
    }
}
