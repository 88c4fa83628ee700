//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("permutation group needs at least one generator")]
    NoGenerators,
    #[error("action is not transitive")]
    NonTransitive,
    #[error("point {0} out of range for degree {1}")]
    PointOutOfRange(usize, usize),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("matrix is not unimodular mod {q}: det = {det}")]
    NotUnimodular { q: u64, det: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid triple: {0}")]
    InvalidTriple(String),
    #[error("non-integral genus for index {index} and triple ({l},{m},{n})")]
    NonIntegralGenus { index: String, l: u64, m: u64, n: u64 },
    #[error("search bound exceeded: {0}")]
    SearchBoundExceeded(String),
    #[error("bound too small: {0}")]
    BoundTooSmall(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("search budget exhausted: {0}")]
    SearchBudgetExhausted(String),
    #[error("word does not stabilize the basepoint")]
    NotInStabilizer,
    #[error("dessin is disconnected")]
    Disconnected,
    #[error("degree cap exceeded: {0}")]
    DegreeCapExceeded(String),
    #[error("checksum mismatch in data table {0}")]
    ChecksumMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
