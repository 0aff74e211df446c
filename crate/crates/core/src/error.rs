use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("register of {requested} qubits exceeds the limit of {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit index {0} listed more than once")]
    DuplicateQubit(usize),

    #[error("matrix is not unitary (max deviation from identity {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("not a valid density operator: {0}")]
    InvalidDensity(String),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("outcome probability {0} outside [0, 1]; the state is corrupted")]
    InvalidProbability(f64),

    #[error("invalid protocol parameters: {0}")]
    InvalidParams(String),

    #[error("quadrature resolution {0} is below the minimum of 2")]
    QuadratureResolution(usize),

    #[error("Monte Carlo estimation needs at least {min} shots, got {got}")]
    TooFewShots { got: usize, min: usize },

    #[error("observed fidelity {0} outside [0, 1]")]
    ObservedOutOfRange(f64),

    #[error("criterion `{criterion}` does not apply here: {reason}")]
    NotApplicable { criterion: String, reason: String },

    #[error("unknown {kind} `{value}`")]
    Unknown { kind: &'static str, value: String },
}

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
