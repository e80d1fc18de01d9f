use thiserror::Error;

/// Errors raised by graph construction, decomposition and shortcut routines.
///
/// Validation routines that report *data* violations (parts, decompositions,
/// gates) return violation lists instead of this type.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("edge {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(usize, usize),
    #[error("graph is disconnected: vertex {0} is unreachable")]
    Disconnected(usize),
    #[error("graph has no rotation system")]
    MissingRotation,
    #[error("invalid rotation system: {0}")]
    InvalidRotation(String),
    #[error("invalid vortex: {0}")]
    InvalidVortex(String),
    #[error("vertex {0} is not in the keep set")]
    NotInKeep(usize),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("invalid parts: {0}")]
    InvalidParts(String),
    #[error("invalid shortcut: {0}")]
    InvalidShortcut(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no applicable construction method: {0}")]
    NoApplicableMethod(String),
    #[error("round limit {limit} exceeded after {rounds} rounds")]
    RoundLimit { limit: usize, rounds: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
