//! State-vector simulation of quantum teleportation protocols and the
//! threshold fidelities that certify honest execution.
//!
//! Everything numeric is generic over [`Real`] (`f64` or `f32`). The aliases
//! at the crate root fix the scalar to `f64`, with `F32` variants alongside.

pub mod certify;
pub mod channels;
pub mod error;
pub mod fidelity;
pub mod gates;
pub mod matrix;
pub mod protocols;
pub mod quadrature;
pub mod scalar;
pub mod statevec;

pub use certify::{
    decide, threshold_for, threshold_table, Adversary, AdversaryModel, CertificateDecision,
    CertificateId, Criterion, ThresholdSource, Verdict,
};
pub use channels::{
    measure_branches, measure_sample, random_bit, regenerate_zero, trash, MeasurementOutcome,
    RngStream, RNG_ALGORITHM,
};
pub use error::{Error, Result};
pub use fidelity::{
    bloch_average, exact_threshold, monte_carlo_threshold, theta_average, theta_sweep,
    threshold_fidelity, FidelityReport, Quadrature,
};
pub use gates::{UnitaryMatrix, MAX_GATE_QUBITS};
pub use matrix::SquareMatrix;
pub use protocols::{
    build_target, run_exact, run_sampled, Announcement, Branch, InputFamily, ProtocolId,
    ProtocolParams, ProtocolRun, TargetState,
};
pub use scalar::Real;
pub use statevec::{DensityOperator, PureState, DEFAULT_MAX_QUBITS};

pub type State = PureState<f64>;
pub type Density = DensityOperator<f64>;
pub type Unitary = UnitaryMatrix<f64>;
pub type StateF32 = PureState<f32>;
pub type DensityF32 = DensityOperator<f32>;
pub type UnitaryF32 = UnitaryMatrix<f32>;
pub type Params = ProtocolParams<f64>;
