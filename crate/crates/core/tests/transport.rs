use proptest::prelude::*;
use sddq::transport::oracle::{transportation_lp, wasserstein_oracle};
use sddq::transport::{wasserstein_1d, EmpiricalDistribution};

fn dist(values: Vec<f64>) -> EmpiricalDistribution {
    EmpiricalDistribution::new(values).unwrap()
}

fn sample(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_coupling_oracle(a in sample(8), b in sample(8)) {
        let (p, q) = (dist(a), dist(b));
        let fast = wasserstein_1d(&p, &q);
        let slow = wasserstein_oracle(&p, &q).unwrap();
        prop_assert!((fast - slow).abs() <= 1e-9, "{fast} vs {slow}");
    }

    #[test]
    fn matches_lp_on_larger_unequal_sizes(a in sample(25), b in sample(25)) {
        let (p, q) = (dist(a), dist(b));
        let lp = transportation_lp(p.sorted_values(), q.sorted_values());
        prop_assert!((wasserstein_1d(&p, &q) - lp).abs() <= 1e-9);
    }

    #[test]
    fn metric_axioms(a in sample(8), b in sample(8), c in sample(8)) {
        let (p, q, r) = (dist(a), dist(b), dist(c));
        prop_assert_eq!(wasserstein_1d(&p, &p), 0.0);
        prop_assert!((wasserstein_1d(&p, &q) - wasserstein_1d(&q, &p)).abs() <= 1e-12);
        prop_assert!(wasserstein_1d(&p, &r) <= wasserstein_1d(&p, &q) + wasserstein_1d(&q, &r) + 1e-9);
        prop_assert!(wasserstein_1d(&p, &q) >= 0.0);
    }

    #[test]
    fn translation_invariant(a in sample(12), b in sample(12), c in -5.0f64..5.0) {
        let (p, q) = (dist(a), dist(b));
        let shifted = wasserstein_1d(&p.shifted(c), &q.shifted(c));
        prop_assert!((shifted - wasserstein_1d(&p, &q)).abs() <= 1e-12);
    }

    #[test]
    fn scale_covariant(a in sample(12), b in sample(12), c in 0.01f64..10.0) {
        let (p, q) = (dist(a), dist(b));
        let scaled = wasserstein_1d(&p.scaled(c).unwrap(), &q.scaled(c).unwrap());
        prop_assert!((scaled - c * wasserstein_1d(&p, &q)).abs() <= 1e-12 * (1.0 + c));
    }

    #[test]
    fn separated_shift_costs_the_mean_gap(a in sample(8), b in sample(8), extra in 0.0f64..3.0) {
        // once every shifted q value lies above every p value, all mass moves up
        let (p, q) = (dist(a), dist(b));
        let c = p.sorted_values().last().unwrap() - q.sorted_values()[0] + extra;
        let mean = |d: &EmpiricalDistribution| d.sorted_values().iter().sum::<f64>() / d.len() as f64;
        let expected = mean(&q) + c - mean(&p);
        prop_assert!((wasserstein_1d(&p, &q.shifted(c)) - expected).abs() <= 1e-12);
    }

    #[test]
    fn shifting_a_copy_costs_the_shift(a in sample(8), c in -3.0f64..3.0) {
        let p = dist(a);
        prop_assert!((wasserstein_1d(&p, &p.shifted(c)) - c.abs()).abs() <= 1e-12);
    }
}

#[test]
fn documented_values() {
    assert_eq!(wasserstein_1d(&dist(vec![0.0, 1.0]), &dist(vec![0.0, 1.0])), 0.0);
    assert!((wasserstein_1d(&dist(vec![0.8]), &dist(vec![0.2])) - 0.6).abs() < 1e-15);
    assert!((wasserstein_1d(&dist(vec![0.2, 0.8]), &dist(vec![0.4, 0.6])) - 0.2).abs() < 1e-15);
    assert!((wasserstein_oracle(&dist(vec![0.1, 0.9]), &dist(vec![0.5])).unwrap() - 0.4).abs() < 1e-15);
    assert_eq!(wasserstein_oracle(&dist(vec![0.0, 1.0]), &dist(vec![1.0, 0.0])).unwrap(), 0.0);
}

#[test]
fn oracle_refuses_oversized_instances() {
    let big = dist(vec![0.5; 101]);
    let other = dist(vec![0.1; 100]);
    assert!(wasserstein_oracle(&big, &other).is_err());
    assert!((wasserstein_1d(&big, &other) - 0.4).abs() < 1e-12);
}
