//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by state construction, gate/channel application, circuit
/// generation, and the simulation engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("basis index {index} out of range for {num_qubits} qubit(s)")]
    BasisIndexOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit index {qubit} out of range for {num_qubits} qubit(s)")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("truncation threshold must lie in [0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),

    #[error("unknown gate name `{0}`")]
    UnknownGate(String),

    #[error("gate `{name}` expects {expected} target(s), got {got}")]
    GateArity {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("gate `{0}` does not take an angle")]
    UnexpectedAngle(String),

    #[error("gate `{0}` requires an angle")]
    MissingAngle(String),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("channel arity {arity} does not match {targets} target qubit(s)")]
    ChannelArity { arity: usize, targets: usize },

    #[error("group size must be at least 1")]
    InvalidGroupSize,

    #[error("expected {expected} angle(s), got {got}")]
    AngleCount { expected: usize, got: usize },

    #[error("Hamming-weight threshold {threshold} out of range [1, {num_qubits}]")]
    InvalidHammingThreshold {
        threshold: usize,
        num_qubits: usize,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cannot sample from an all-zero distribution")]
    ZeroDistribution,

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("invalid factor: {0}")]
    InvalidFactor(String),

    #[error("circuit is malformed: {0}")]
    InvalidCircuit(String),

    #[error("circuit file: {0}")]
    CircuitFormat(String),

    #[error("internal consistency violation: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
