use thiserror::Error;

use crate::distsim::wire::WireError;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state is not normalized (norm deviates by {0:.3e})")]
    NotNormalized(f64),
    #[error("{0} qubits requested, maximum supported is 8")]
    TooManyQubits(usize),
    #[error("amplitude vector has length {got}, expected {expected}")]
    BadAmplitudeCount { got: usize, expected: usize },
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("repeated target index {0}")]
    RepeatedTarget(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("a controlled operation needs at least one branch unitary")]
    EmptyBranches,
    #[error("unknown gate name `{0}`")]
    UnknownGate(String),
    #[error("unknown dispersive model `{0}`")]
    UnknownModel(String),
    #[error("grid size {0} is below the minimum of 16")]
    GridTooSmall(usize),
    #[error("dot separation must be positive, got {0} m")]
    NonPositiveSeparation(f64),
    #[error("integrator step {dt:.3e} s exceeds the full-frame cap {cap:.3e} s")]
    StepTooLarge { dt: f64, cap: f64 },
    #[error("invalid drive: {0}")]
    BadDrive(String),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("protocol order violation: {0}")]
    ProtocolOrder(String),
    #[error("ownership violation: {0}")]
    Ownership(String),
    #[error("transport: {0}")]
    Transport(String),
    #[error("parameter file: {0}")]
    Params(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
