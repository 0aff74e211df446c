mod common;

use proptest::prelude::*;
use qtp_core::channels::{self, RngStream};
use qtp_core::DensityOperator;

proptest! {
    #[test]
    fn measure_and_discard_equals_trash(s in common::state(3), q in 0usize..3) {
        let mixed = channels::measure_branches(&s, q)
            .unwrap()
            .iter()
            .filter_map(|o| o.post_state.as_ref().map(|p| p.to_density().scaled(o.probability)))
            .fold(DensityOperator::zero(2), |acc, r| acc.add(&r).unwrap());
        prop_assert!(mixed.max_abs_diff(&channels::trash(&s, q).unwrap()) <= 1e-12);
    }

    #[test]
    fn branch_probabilities_sum_to_one(s in common::state(3), q in 0usize..3) {
        let [zero, one] = channels::measure_branches(&s, q).unwrap();
        prop_assert!((zero.probability + one.probability - 1.0).abs() <= 1e-12);
        for o in [zero, one] {
            if let Some(p) = o.post_state {
                prop_assert!((p.norm_sqr() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn regenerated_qubit_is_pure_zero(s in common::state(2), q in 0usize..2) {
        let rho = channels::regenerate_zero(&channels::trash(&s, q).unwrap(), q).unwrap();
        let fresh = rho.partial_trace(&[1 - q]).unwrap();
        prop_assert!((fresh.matrix()[(0, 0)].re - 1.0).abs() <= 1e-12);
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn sampled_frequencies_match_born_probabilities() {
    let s = qtp_core::PureState::<f64>::from_reals(2, &[0.5, 0.5, 0.1f64.sqrt(), 0.4f64.sqrt()]).unwrap();
    let p1 = 0.5;
    let n = 100_000;
    let mut rng = RngStream::new(11);
    let ones = (0..n)
        .filter(|_| channels::measure_sample(&s, 0, &mut rng).unwrap().bit == 1)
        .count();
    let freq = ones as f64 / n as f64;
    let tol = 4.0 * (p1 * (1.0 - p1) / n as f64).sqrt();
    assert!((freq - p1).abs() <= tol, "{freq}");
}

#[test]
fn random_bit_mean_within_one_percent() {
    let mut rng = RngStream::new(2024);
    let n = 100_000;
    let mean = (0..n).map(|_| f64::from(channels::random_bit(&mut rng))).sum::<f64>() / n as f64;
    assert!((mean - 0.5).abs() <= 0.01);
}

#[test]
fn random_bit_is_independent_of_qubit_outcomes() {
    // G shares no state with the register; the joint table must factorize.
    let s = qtp_core::PureState::<f64>::from_reals(1, &[0.6, 0.8]).unwrap();
    let mut rng = RngStream::new(5);
    let n = 100_000;
    let mut table = [[0u32; 2]; 2];
    for _ in 0..n {
        let q = channels::measure_sample(&s, 0, &mut rng).unwrap().bit as usize;
        let g = channels::random_bit(&mut rng) as usize;
        table[q][g] += 1;
    }
    for (q, pq) in [(0, 0.36), (1, 0.64)] {
        for &count in &table[q] {
            let p = pq * 0.5;
            let freq = f64::from(count) / n as f64;
            assert!((freq - p).abs() <= 4.0 * (p * (1.0 - p) / n as f64).sqrt());
        }
    }
}
