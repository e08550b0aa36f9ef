use std::io;

use thiserror::Error;

/// Errors produced anywhere in the estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid Pauli string {input:?}: {reason}")]
    ParsePauli { input: String, reason: String },

    #[error("qubit count {0} out of range (supported: 1..={max})", max = crate::pauli::MAX_QUBITS)]
    QubitCount(usize),

    #[error("matrix shape mismatch: {0}")]
    Shape(String),

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("symplectic ordering needs an even number of index bits, got {0}")]
    OddSymplecticBits(u32),

    #[error("rates do not form a distribution: total {total} (deficit {deficit:e})")]
    Normalization { total: f64, deficit: f64 },

    #[error("negative rate {rate} for {label}")]
    NegativeRate { label: String, rate: f64 },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("duplicate label {0}")]
    DuplicateLabel(String),

    #[error("eigenvalue for {0} is not available")]
    MissingEigenvalue(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
