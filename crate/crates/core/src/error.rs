use thiserror::Error;

use crate::contract::Status;

/// Errors produced anywhere in the audit library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("wrong length: expected {expected} bytes, got {got}")]
    WrongLength { expected: usize, got: usize },

    #[error("invalid encoding at byte offset {offset}: {reason}")]
    InvalidEncoding { offset: usize, reason: &'static str },

    #[error("unknown suite identifier {0:#04x}")]
    UnknownSuite(u8),

    #[error("cannot encode an empty file")]
    EmptyFile,

    #[error("original length {original_length} exceeds the {capacity} bytes held by the blocks")]
    InconsistentLength { original_length: u64, capacity: u64 },

    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("chunk index {index} out of range for {d} chunks")]
    IndexOutOfRange { index: u64, d: u64 },

    #[error("randomness beacon has no output for round {0}")]
    BeaconUnavailable(u64),

    #[error("interpolation needs {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("duplicate evaluation point")]
    DuplicatePoint,

    #[error("coefficient matrix is singular")]
    SingularSystem,

    #[error("contract is in state {actual:?}, expected {expected}")]
    WrongState { expected: &'static str, actual: Status },

    #[error("invalid agreement: {0}")]
    InvalidAgreement(&'static str),

    #[error("deposits must both be positive")]
    InsufficientDeposit,

    #[error("all {0} audits have already been performed")]
    AuditsExhausted(u64),

    #[error("no proof is pending verification")]
    NoProofPending,

    #[error("ledger line {line}: {reason}")]
    MalformedLedger { line: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
