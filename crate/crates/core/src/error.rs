use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not square-free")]
    NotSquarefree(u64),

    #[error("invalid level {0}: {1}")]
    InvalidLevel(u64, &'static str),

    #[error("invalid discriminant {0}: must be negative and congruent to 0 or 1 mod 4")]
    InvalidDiscriminant(i64),

    #[error("fixed-point count nu({level}, {d}) is not covered: {reason}")]
    UnsupportedFixedPoint {
        level: u64,
        d: u64,
        reason: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing fixture file {}", .0.display())]
    MissingFixture(PathBuf),

    #[error("{path}:{line}: {msg}")]
    Schema {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("orbit {id} violates invariant: {msg}")]
    OrbitInvariant { id: String, msg: String },

    #[error("missing a_{p} data for orbit {id}")]
    MissingAp { id: String, p: u64 },

    #[error("insufficient precision: need {need} q-terms, have {have}")]
    Precision { need: usize, have: usize },

    #[error("prime {p} divides the level {level}")]
    BadReduction { p: u64, level: u64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("internal contradiction: {0}")]
    Contradiction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
