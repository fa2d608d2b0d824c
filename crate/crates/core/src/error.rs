use thiserror::Error;

use crate::access::{ParseError, PartySet};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid access structure: {0}")]
    InvalidAccess(String),

    #[error("field of order {q} too small for a gate of fan-in {fan_in} (need q > fan-in)")]
    FanInOverflow { q: u64, fan_in: usize },

    #[error("party set {0} is not qualified")]
    NotQualified(PartySet),

    #[error("party set {0} is qualified")]
    Qualified(PartySet),

    #[error("coefficient coordinate {coord} exceeds the signed range of F_{modulus} (|c| <= {bound})")]
    CoefficientOverflow { coord: i64, modulus: u64, bound: i64 },

    #[error("function has {terms} Fourier terms but the budget is {budget}")]
    TermOverflow { terms: usize, budget: usize },

    #[error("invalid truth table: {0}")]
    InvalidTruthTable(String),

    #[error("invalid function description: {0}")]
    InvalidFunction(String),

    #[error("inconsistent shares: {0}")]
    InconsistentShares(String),

    #[error("decoded value {re}{im:+}i is not within 1e-6 of +1 or -1")]
    RoundingFailure { re: f64, im: f64 },

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("enumeration budget exceeded: {needed} > {limit}")]
    BudgetExceeded { needed: u128, limit: u128 },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {source}")]
    Malformed {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: 2 validation, 3 not qualified, 4 integrity.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotQualified(_) => 3,
            Error::InconsistentShares(_)
            | Error::RoundingFailure { .. }
            | Error::Integrity(_)
            | Error::Malformed { .. } => 4,
            _ => 2,
        }
    }
}
