use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("box {0} was already queried by Alice")]
    AliceRequeried(usize),

    #[error("box {0} was already queried by Bob")]
    BobRequeried(usize),

    #[error("Bob queried box {0} before Alice")]
    BobBeforeAlice(usize),

    #[error("data length {0} is not a power of two >= 2")]
    BadDataLength(usize),

    #[error("index {index} out of range for {len} bits")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("pyramid has {pyramid} levels but input needs {input}")]
    LevelMismatch { pyramid: usize, input: usize },

    #[error("pyramid already used for encoding")]
    PyramidReused,

    #[error("decode requested before Alice encoded")]
    DecodeBeforeEncode,

    #[error("{what} = {value} exceeds the supported maximum {max}")]
    TooLarge {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("malformed truth table: {0}")]
    MalformedTable(String),

    #[error("probability table is invalid: {0}")]
    InvalidDistribution(String),

    #[error("alphabet size d = {0} must be at least 2")]
    AlphabetTooSmall(usize),

    #[error("{0} did not converge within {1} iterations")]
    NoConvergence(&'static str, usize),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid subsystem cut: {0}")]
    BadCut(String),

    #[error("channel is not trace preserving (completeness defect {0:e})")]
    NotTracePreserving(f64),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid trial plan: {0}")]
    InvalidPlan(String),
}

pub type Result<T> = std::result::Result<T, Error>;
