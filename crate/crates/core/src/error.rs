use thiserror::Error;

/// Errors raised by every layer of the library.
///
/// The variants are grouped by the category the command line maps onto exit
/// codes: parse problems, capacity limits, invalid decompositions and the
/// remaining contract violations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected} inputs, got {actual}")]
    Arity { expected: usize, actual: usize },

    #[error("input position {position} is not an input of a function of arity {arity}")]
    UnknownInput { position: usize, arity: usize },

    #[error("{what}: {actual} exceeds the limit of {limit}")]
    Capacity {
        what: String,
        limit: String,
        actual: String,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex {vertex} has input {input} outside the requested vertex set; use controlled_restrict")]
    DanglingInput { vertex: usize, input: usize },

    #[error("not a decomposition: edge {from} -> {to} runs backwards")]
    Decomposition { from: usize, to: usize },

    #[error("parts do not partition the vertex set: {0}")]
    Partition(String),

    #[error("{0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid generator configuration: {0}")]
    Config(String),

    #[error("vertex {0} does not belong to this network")]
    UnknownVertex(usize),
}

impl Error {
    /// Capacity error; `limit` and `actual` are rendered in decimal so that
    /// arbitrary-precision counts stay exact.
    pub(crate) fn capacity(what: impl Into<String>, limit: impl ToString, actual: impl ToString) -> Self {
        Error::Capacity {
            what: what.into(),
            limit: limit.to_string(),
            actual: actual.to_string(),
        }
    }

    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }

    /// Short machine-readable category name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Arity { .. } => "arity",
            Error::UnknownInput { .. } => "unknown-input",
            Error::Capacity { .. } => "capacity",
            Error::Parse { .. } => "parse",
            Error::DanglingInput { .. } => "dangling-input",
            Error::Decomposition { .. } => "decomposition",
            Error::Partition(_) => "partition",
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::Config(_) => "config",
            Error::UnknownVertex(_) => "unknown-vertex",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
