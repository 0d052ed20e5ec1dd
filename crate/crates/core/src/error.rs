use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("point {0} is not part of this system")]
    UnknownPoint(String),
    #[error("mixed coordinate systems: {0} and {1}")]
    MixedCoordinates(String, String),
    #[error("orbit of {point} leaves the representable set at step {step}")]
    Unrepresentable { point: String, step: i64 },
    #[error("comparison undecided at maximum precision for pair ({0}, {1})")]
    Undecided(String, String),
    #[error("precision 2^-{requested} unreachable within K={max_k}; achieved width {achieved}")]
    PrecisionUnreachable { requested: u32, max_k: u32, achieved: String },
    #[error("space is not countable: {0}")]
    NotCountable(String),
    #[error("limit structure is not well-founded at class `{0}`")]
    NotWellFounded(String),
    #[error("geometric placement failed: {0}")]
    Placement(String),
    #[error("ambiguous winding assignment at index {index}: {detail}")]
    AmbiguousWinding { index: i64, detail: String },
    #[error("ordinal {0} is a limit; use the limit glue builder")]
    LimitOrdinal(String),
    #[error("ordinal {0} exceeds the tower cap {1}")]
    OrdinalCap(String, String),
    #[error("undecided points block the omega chain: {0:?}")]
    UndecidedLevel(Vec<String>),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("report kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: String, found: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
