//! Non-unitary primitives: destructive measurement, trash, random bits and
//! qubit regeneration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::statevec::{DensityOperator, PureState};

/// Name of the generator behind [`RngStream`], recorded in output artifacts.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Deterministic uniform source.
///
/// ChaCha is counter based: `(seed, stream)` addresses an independent
/// keystream, so shot `i` of a Monte Carlo run draws from stream `i` and the
/// result does not depend on which thread executes it.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    draws: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            seed,
            stream,
            draws: 0,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.draws += 1;
        self.rng.random::<f64>()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementOutcome<T> {
    pub bit: u8,
    pub probability: T,
    /// Renormalized state of the remaining qubits; `None` when the outcome
    /// has zero probability and the state is undefined.
    pub post_state: Option<PureState<T>>,
}

impl<T: Real> MeasurementOutcome<T> {
    pub fn is_defined(&self) -> bool {
        self.post_state.is_some()
    }
}

fn zero_probability<T: Real>(state: &PureState<T>, qubit: usize) -> Result<T> {
    state.check_normalized()?;
    let p0 = state.zero_weight(qubit)?;
    if p0 < -T::TOLERANCE || p0 > T::one() + T::TOLERANCE || !p0.is_finite() {
        return Err(Error::InvalidProbability(p0.to_f64_lossy()));
    }
    Ok(p0.max(T::zero()).min(T::one()))
}

fn outcome<T: Real>(state: &PureState<T>, qubit: usize, bit: u8, probability: T) -> Result<MeasurementOutcome<T>> {
    let projected = state.project_out(qubit, bit)?;
    let post_state = if probability <= T::probability_floor() {
        None
    } else {
        projected.normalized()
    };
    Ok(MeasurementOutcome {
        bit,
        probability,
        post_state,
    })
}

/// Samples a destructive computational-basis measurement of `qubit`.
///
/// Outcome 0 occurs with probability `p0 = Σ |amp|²` over labels whose
/// `qubit` bit is 0 (the Born rule). The measured qubit is removed from the
/// register of the returned state.
pub fn measure_sample<T: Real>(
    state: &PureState<T>,
    qubit: usize,
    rng: &mut RngStream,
) -> Result<MeasurementOutcome<T>> {
    let p0 = zero_probability(state, qubit)?;
    let bit = if rng.uniform() < p0.to_f64_lossy() { 0 } else { 1 };
    let p = if bit == 0 { p0 } else { T::one() - p0 };
    outcome(state, qubit, bit, p)
}

/// Both outcomes of measuring `qubit`, in bit order, zero-probability
/// outcomes included.
pub fn measure_branches<T: Real>(
    state: &PureState<T>,
    qubit: usize,
) -> Result<[MeasurementOutcome<T>; 2]> {
    let p0 = zero_probability(state, qubit)?;
    Ok([
        outcome(state, qubit, 0, p0)?,
        outcome(state, qubit, 1, T::one() - p0)?,
    ])
}

/// Anything that can be viewed as a density operator.
pub trait AsDensity<T> {
    fn as_density(&self) -> DensityOperator<T>;
}

impl<T: Real> AsDensity<T> for PureState<T> {
    fn as_density(&self) -> DensityOperator<T> {
        self.to_density()
    }
}

impl<T: Real> AsDensity<T> for DensityOperator<T> {
    fn as_density(&self) -> DensityOperator<T> {
        self.clone()
    }
}

/// Discards `qubit` without recording anything: a partial trace.
pub fn trash<T: Real, S: AsDensity<T>>(state: &S, qubit: usize) -> Result<DensityOperator<T>> {
    state.as_density().partial_trace(&[qubit])
}

/// A fair classical bit: 0 when the uniform draw is at least 1/2.
pub fn random_bit(rng: &mut RngStream) -> u8 {
    if rng.uniform() >= 0.5 {
        0
    } else {
        1
    }
}

/// Inserts a fresh `|0><0|` so that it becomes qubit `at`.
pub fn regenerate_zero<T: Real>(state: &DensityOperator<T>, at: usize) -> Result<DensityOperator<T>> {
    state.insert_zero_qubit(at)
}
