use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("DomainError: {0}")]
    Domain(String),

    #[error("AllocationError: could not allocate {bytes} bytes")]
    Allocation { bytes: u64 },

    #[error("InvalidShape: {0}")]
    InvalidShape(String),

    #[error("InvalidSize: tree size {0} must be odd and at least 1")]
    InvalidSize(u64),

    #[error("UnsupportedArity: line {line}: primitive `{name}` has arity {arity}, only 0 and 2 are supported")]
    UnsupportedArity {
        line: usize,
        name: String,
        arity: String,
    },

    #[error("MalformedLine: line {line}: expected `name arity`, got `{text}`")]
    MalformedLine { line: usize, text: String },

    #[error("DuplicateName: primitive `{0}` is defined more than once")]
    DuplicateName(String),

    #[error("NameTooLong: primitive name `{0}` exceeds 255 bytes")]
    NameTooLong(String),

    #[error("IncompleteSet: a primitive set needs at least one terminal and one function")]
    IncompleteSet,

    #[error("TooManyPrimitives: {0} primitives given, at most 255 fit in one opcode byte")]
    TooManyPrimitives(usize),

    #[error("RecursionLimit: recursion deeper than {0}, use the lattice depth instead")]
    RecursionLimit(usize),

    #[error("TooLarge: {what} is {value}, limit is {limit}")]
    TooLarge {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("Overflow: {0}")]
    Overflow(String),

    #[error("TooFewTrials: {trials} trials given, at least {needed} needed")]
    TooFewTrials { trials: u64, needed: u64 },

    #[error("TooFewPoints: a log-log fit needs at least 3 distinct sizes, got {0}")]
    TooFewPoints(usize),

    #[error("FormatError: {0}")]
    Format(String),

    #[error("PrimitiveMismatch: {0}")]
    PrimitiveMismatch(String),

    #[error("ClockError: {0}")]
    Clock(String),

    #[error("IoError: {0}")]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::InvalidShape(msg.into())
    }
}
