// Fit the Huber-loss MLP to pseudo-labels, then score the embeddings with it.
//
// ```bash
// cargo run --example train_regressor
// ```

use sddq::dataset::SamplingConfig;
use sddq::labels::{generate_labels, LabelMode};
use sddq::regressor::{predict, train, RegressorModel, TrainConfig};
use sddq::stats::spearman;
use sddq::synth::{generate, SynthConfig};

pub fn run_example() -> sddq::Result<()> {
    let (ds, _) = generate(&SynthConfig::benchmark(7))?;
    let labels = generate_labels(&ds, LabelMode::Sampled, &SamplingConfig::new(24, 12, 7)?)?;

    let cfg = TrainConfig::default();
    let (model, log) = train(&ds, &labels.entries, &cfg)?;
    let first = log.epoch_loss[0];
    let last = *log.epoch_loss.last().unwrap();
    println!("{} epochs, loss {first:.3} -> {last:.3}", cfg.epochs);

    let predicted = predict(&model, labels.indices().into_iter().map(|i| ds.row(i)))?;
    let rho = spearman(&predicted, &labels.scores());
    println!("spearman(predicted, labels) = {rho:.3}");

    let path = std::env::temp_dir().join(format!("sddq-example-model-{}.json", std::process::id()));
    model.save(&path, Some(&cfg))?;
    let (reloaded, saved_cfg) = RegressorModel::load(&path)?;
    std::fs::remove_file(&path).ok();
    assert_eq!(reloaded, model);
    assert_eq!(saved_cfg, Some(cfg));
    assert!(rho > 0.7);
    Ok(())
}

fn main() -> sddq::Result<()> {
    run_example()
}
