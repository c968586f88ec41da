use proptest::prelude::*;
use rand::Rng;
use sddq::eval::{aoc, evrc, fmr, fnmr, threshold_at_fmr, EvrcPoint, PairPool};
use sddq::seeding::rng_from_seed;
use sddq::synth::{generate, SynthConfig};

fn sims(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..=max_len)
}

fn phi_grid() -> Vec<f64> {
    (0..=95).map(|k| k as f64 / 100.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rates_are_monotone_in_threshold(pos in sims(30), neg in sims(30)) {
        let pool = PairPool::new(pos, neg, "prop");
        let mut candidates: Vec<f64> = pool.pos().iter().chain(pool.neg()).copied().collect();
        candidates.extend([-1.0, 1.0]);
        candidates.sort_by(f64::total_cmp);
        for w in candidates.windows(2) {
            prop_assert!(fmr(&pool, w[1]).unwrap() <= fmr(&pool, w[0]).unwrap());
            prop_assert!(fnmr(&pool, w[1]).unwrap() >= fnmr(&pool, w[0]).unwrap());
        }
    }

    #[test]
    fn threshold_round_trip(neg in sims(300), t in prop::sample::select(vec![1e-1, 1e-2, 1e-3])) {
        let pool = PairPool::new(vec![0.5], neg, "prop");
        let xi = threshold_at_fmr(&pool, t).unwrap();
        prop_assert!(fmr(&pool, xi).unwrap() <= t);
        // the next lower candidate threshold is infeasible
        if let Some(&lower) = pool.neg().iter().rev().find(|&&s| s < xi) {
            prop_assert!(fmr(&pool, lower).unwrap() > t);
        }
    }

    #[test]
    fn raising_the_curve_never_raises_aoc(
        g in prop::collection::vec(0.0f64..1.0, 96),
        k in 0usize..96,
        bump in 0.0f64..1.0,
    ) {
        let points: Vec<EvrcPoint> = g
            .iter()
            .enumerate()
            .map(|(j, &v)| EvrcPoint { phi: j as f64 / 100.0, threshold: 0.0, fnmr: v })
            .collect();
        let mut raised = points.clone();
        raised[k].fnmr = (raised[k].fnmr + bump).min(1.0);
        prop_assert!(aoc(&raised, 0.0, 0.95).unwrap() <= aoc(&points, 0.0, 0.95).unwrap());
    }
}

#[test]
fn no_rejection_is_the_whole_set() {
    let (ds, truth) = generate(&SynthConfig::benchmark(3)).unwrap();
    let pool = PairPool::from_dataset(&ds);
    let expected = fnmr(&pool, threshold_at_fmr(&pool, 1e-2).unwrap()).unwrap();
    let curve = evrc(&ds, &truth.truth_quality(), 1e-2, &[0.0, 0.5], "truth").unwrap();
    assert_eq!(curve.fnmr_at(0.0), Some(expected));
    assert!(curve.fnmr_at(0.5).unwrap() <= curve.fnmr_at(0.0).unwrap());
}

#[test]
fn equal_scores_reject_by_descending_index() {
    let (ds, _) = generate(&SynthConfig::benchmark(4)).unwrap();
    let flat = evrc(&ds, &vec![1.0; ds.len()], 1e-2, &phi_grid(), "flat").unwrap();
    let by_index: Vec<f64> = (0..ds.len()).map(|i| -(i as f64)).collect();
    let ordered = evrc(&ds, &by_index, 1e-2, &phi_grid(), "flat").unwrap();
    assert_eq!(flat, ordered);
}

#[test]
fn truth_scores_stay_close_to_random_or_better() {
    for seed in 0..10 {
        let (ds, truth) = generate(&SynthConfig::benchmark(seed)).unwrap();
        let mut rng = rng_from_seed(500 + seed);
        let random: Vec<f64> = (0..ds.len()).map(|_| rng.random()).collect();
        let perfect = evrc(&ds, &truth.truth_quality(), 1e-2, &phi_grid(), "truth").unwrap();
        let baseline = evrc(&ds, &random, 1e-2, &phi_grid(), "random").unwrap();
        for p in &perfect.points {
            if let Some(r) = baseline.fnmr_at(p.phi) {
                assert!(p.fnmr <= r + 0.05, "seed {seed}, phi {}: {} vs random {r}", p.phi, p.fnmr);
            }
        }
    }
}

#[test]
fn curves_do_not_depend_on_thread_count() {
    let (ds, truth) = generate(&SynthConfig::benchmark(6)).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| evrc(&ds, &truth.truth_quality(), 1e-3, &phi_grid(), "truth").unwrap())
    };
    let one = run(1);
    assert_eq!(run(4), one);
}

#[test]
fn curve_points_are_well_formed() {
    let (ds, truth) = generate(&SynthConfig::benchmark(9)).unwrap();
    let curve = evrc(&ds, &truth.truth_quality(), 1e-2, &phi_grid(), "truth").unwrap();
    assert!(curve.points.windows(2).all(|w| w[0].phi < w[1].phi));
    assert!(curve.points.iter().all(|p| (0.0..=1.0).contains(&p.fnmr)));
    assert_eq!(curve.points.len() + curve.omitted.len(), phi_grid().len());
}
