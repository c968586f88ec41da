mod common;

use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use sddq::dataset::{similarity_profile, EmbeddingDataset, SamplingConfig};
use sddq::labels::{exact_raw_quality, generate_labels, normalize_scores, sampled_raw_quality, LabelMode};
use sddq::seeding::rng_from_seed;
use sddq::synth::{generate, SynthConfig};
use sddq::transport::wasserstein_1d_values;

proptest! {
    #[test]
    fn normalization_is_monotone_and_bounded(raw in prop::collection::vec(0.0f64..2.0, 1..50)) {
        let scores = normalize_scores(&raw).unwrap();
        for i in 0..raw.len() {
            prop_assert!((0.0..=100.0).contains(&scores[i]));
            for j in 0..raw.len() {
                if raw[i] < raw[j] {
                    prop_assert!(scores[i] <= scores[j]);
                }
            }
        }
        let (lo, hi) = raw.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        if lo < hi {
            prop_assert!(scores.contains(&0.0) && scores.contains(&100.0));
        } else {
            prop_assert!(scores.iter().all(|&s| s == 50.0));
        }
    }

    #[test]
    fn scaling_similarities_scales_raw_and_keeps_scores(seed in 0u64..50, c in 0.05f64..5.0) {
        let (ds, _) = generate(&SynthConfig { num_identities: 4, samples_per_identity: 4, ..SynthConfig::benchmark(seed) }).unwrap();
        let mut raw = Vec::new();
        let mut scaled_raw = Vec::new();
        for i in 0..ds.len() {
            let p = similarity_profile(&ds, i).unwrap();
            let scale = |v: &[f64]| v.iter().map(|x| c * x).collect::<Vec<_>>();
            raw.push(wasserstein_1d_values(&p.pos, &p.neg).unwrap());
            scaled_raw.push(wasserstein_1d_values(&scale(&p.pos), &scale(&p.neg)).unwrap());
        }
        for (r, s) in raw.iter().zip(&scaled_raw) {
            prop_assert!((s - c * r).abs() <= 1e-12);
        }
        let (a, b) = (normalize_scores(&raw).unwrap(), normalize_scores(&scaled_raw).unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }
}

#[test]
fn noise_ladder_lowers_quality() {
    let ladder = [0.0, 0.25, 0.5, 1.0, 2.0];
    let mut rng = rng_from_seed(2024);
    let mut monotone = 0;
    let trials = 20;
    for trial in 0..trials {
        let (ds, _) = generate(&SynthConfig {
            noise_min: 0.1,
            noise_max: 0.6,
            ..SynthConfig::benchmark(100 + trial)
        })
        .unwrap();
        let i = rng.random_range(0..ds.len());
        let direction: Vec<f64> = (0..ds.dim()).map(|_| rng.sample::<f64, _>(StandardNormal) / (ds.dim() as f64).sqrt()).collect();
        let qualities: Vec<f64> = ladder
            .iter()
            .map(|&s| {
                let row: Vec<f64> = ds.row(i).iter().zip(&direction).map(|(x, g)| x + s * g).collect();
                exact_raw_quality(&common::with_row(&ds, i, &row), i).unwrap()
            })
            .collect();
        if qualities.windows(2).all(|w| w[1] <= w[0]) {
            monotone += 1;
        }
    }
    assert!(monotone * 10 >= trials * 9, "{monotone}/{trials} trials monotone");
}

#[test]
fn exact_mode_ignores_master_seed() {
    let (ds, _) = generate(&SynthConfig::benchmark(4)).unwrap();
    let a = generate_labels(&ds, LabelMode::Exact, &SamplingConfig::new(24, 12, 1).unwrap()).unwrap();
    let b = generate_labels(&ds, LabelMode::Exact, &SamplingConfig::new(5, 2, 99).unwrap()).unwrap();
    assert_eq!(a.entries, b.entries);
}

#[test]
fn labels_do_not_depend_on_thread_count() {
    let (ds, _) = generate(&SynthConfig::benchmark(5)).unwrap();
    let cfg = SamplingConfig::new(24, 12, 5).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            (
                generate_labels(&ds, LabelMode::Sampled, &cfg).unwrap(),
                generate_labels(&ds, LabelMode::Exact, &cfg).unwrap(),
            )
        })
    };
    let one = run(1);
    for threads in [2, 8] {
        assert_eq!(run(threads), one);
    }
}

#[test]
fn degenerate_classes_make_sampling_exact() {
    // class 0 has two members; class 1 members coincide, so every impostor
    // similarity of row 0 is the same value
    let ds = EmbeddingDataset::new(
        vec![1.0, 0.0, 0.0, 0.6, 0.8, 0.0, 0.0, 0.6, 0.8, 0.0, 0.6, 0.8, 0.0, 0.6, 0.8],
        3,
        vec![0, 0, 1, 1, 1],
    )
    .unwrap();
    let exact = exact_raw_quality(&ds, 0).unwrap();
    for seed in 0..10 {
        let cfg = SamplingConfig::new(50, 1, seed).unwrap();
        assert!((sampled_raw_quality(&ds, 0, &cfg).unwrap() - exact).abs() < 1e-12);
    }
}

#[test]
fn sampled_labels_track_exact_on_small_sets() {
    let (ds, _) = generate(&SynthConfig::benchmark(8)).unwrap();
    let exact = generate_labels(&ds, LabelMode::Exact, &SamplingConfig::default()).unwrap();
    let sampled = generate_labels(&ds, LabelMode::Sampled, &SamplingConfig::new(200, 64, 8).unwrap()).unwrap();
    assert!(sampled_raw_quality(&ds, 0, &SamplingConfig::new(200, 64, 8).unwrap()).unwrap() > 0.0);
    assert!(sddq::stats::spearman(&exact.raw(), &sampled.raw()) >= 0.99);
    let scores = sampled.scores();
    assert!(scores.iter().any(|&s| s == 0.0) && scores.iter().any(|&s| s == 100.0));
}
