#![allow(dead_code)]

use num_complex::Complex;
use proptest::prelude::*;
use qtp_core::{PureState, State};

/// Normalized random state on `n` qubits; rejects the (measure-zero) null draw.
pub fn state(n: usize) -> impl Strategy<Value = State> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map("null vector", move |v| {
        let amps = v.into_iter().map(|(re, im)| Complex::new(re, im)).collect();
        PureState::new(n, amps).ok()?.normalized()
    })
}

pub fn angle() -> impl Strategy<Value = f64> {
    0.0..std::f64::consts::TAU
}
