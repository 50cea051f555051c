use thiserror::Error;

/// Errors shared by every layer of the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("characteristic {0} is neither 0 nor a prime")]
    NotPrime(u64),

    #[error("mixed field specs: {0} vs {1}")]
    MixedFields(String, String),

    #[error("cannot parse scalar {text:?} over {field}")]
    BadScalar { text: String, field: String },

    #[error("duplicate basis label {0:?}")]
    DuplicateLabel(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("bad alphabet: {0}")]
    BadAlphabet(String),

    #[error("alphabet mismatch between operands")]
    AlphabetMismatch,

    #[error("weight {weight} out of range 1..={cap}")]
    WeightOutOfRange { weight: u32, cap: u32 },

    #[error("word {0:?} is not a Lyndon word")]
    NotLyndon(String),

    #[error("degree cap {cap} too small: {reason}")]
    CapTooSmall { cap: u32, reason: String },

    #[error("element is not primitive: {0}")]
    NotPrimitive(String),

    #[error("ideal dimensions did not stabilize at slack {slack}: increase slack ({detail})")]
    SlackNotStabilized { slack: u32, detail: String },

    #[error("rewriting system is not confluent; overlap witness: {0}")]
    NotConfluent(String),

    #[error("restricted structure requested over characteristic {0}")]
    NotModularField(u64),

    #[error("characteristic {p} exceeds degree cap {cap}: p-th powers are invisible")]
    CharAboveCap { p: u64, cap: u32 },

    #[error("degree {n} outside the safe window 1..={max}")]
    DegreeOutOfWindow { n: u32, max: u32 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
