mod common;

use proptest::prelude::*;
use qtp_core::statevec::{self, DensityOperator};
use qtp_core::{gates, PureState};

proptest! {
    #[test]
    fn unitaries_preserve_norm(s in common::state(3), theta in common::angle(), phi in common::angle(), q in 0usize..3) {
        let out = s.apply_unitary(&gates::bloch_rotation(theta, phi), &[q]).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace_and_positivity(s in common::state(3), q in 0usize..3) {
        let rho = s.to_density().partial_trace(&[q]).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-12);
        prop_assert!(rho.hermiticity_error() <= 1e-12);
        prop_assert!(rho.min_eigenvalue() >= -1e-10);
        rho.validate().unwrap();
    }

    #[test]
    fn reduced_density_matches_full_partial_trace(s in common::state(3), q in 0usize..3) {
        let direct = s.reduced_density(&[q]).unwrap();
        let via_full = statevec::partial_trace(&statevec::to_density(&s), &[q]).unwrap();
        prop_assert!(direct.max_abs_diff(&via_full) <= 1e-12);
    }

    #[test]
    fn tracing_a_product_factor_recovers_the_other(a in common::state(1), b in common::state(2)) {
        let rho = statevec::tensor(&a, &b).unwrap().to_density();
        let left = rho.partial_trace(&[1, 2]).unwrap();
        let right = rho.partial_trace(&[0]).unwrap();
        prop_assert!(left.max_abs_diff(&a.to_density()) <= 1e-12);
        prop_assert!(right.max_abs_diff(&b.to_density()) <= 1e-12);
    }

    #[test]
    fn expectation_of_own_projector_is_one(s in common::state(2)) {
        prop_assert!((statevec::expectation(&s.to_density(), &s).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn expectation_in_maximally_mixed_is_uniform(s in common::state(2)) {
        let v = DensityOperator::<f64>::maximally_mixed(2).expectation(&s).unwrap();
        prop_assert!((v - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn conjugation_agrees_with_pure_evolution(s in common::state(2), theta in common::angle(), phi in common::angle()) {
        let u = gates::bloch_rotation(theta, phi).kron(&gates::hadamard()).unwrap();
        let pure = statevec::apply_unitary(&s, &u, &[1, 0]).unwrap().to_density();
        let mixed = s.to_density().conjugate(&u, &[1, 0]).unwrap();
        prop_assert!(pure.max_abs_diff(&mixed) <= 1e-12);
    }
}

#[test]
fn f32_states_meet_their_tolerance() {
    let s = PureState::<f32>::zero(2)
        .unwrap()
        .apply_unitary(&gates::entanglement_gadget(), &[0, 1])
        .unwrap();
    let rho = s.reduced_density(&[1]).unwrap();
    assert!(rho.max_abs_diff(&DensityOperator::maximally_mixed(1)) <= 1e-6);
}
