use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed model string: {0}")]
    ModelString(String),
    #[error("duplicate node '{0}'")]
    DuplicateNode(String),
    #[error("unknown node '{0}'")]
    UnknownNode(String),
    #[error("invalid node label '{0}'")]
    InvalidLabel(String),
    #[error("self-loop on node '{0}'")]
    SelfLoop(String),
    /// The message text is part of the public contract.
    #[error("the resulting graph contains cycles.")]
    Cycle,
    #[error("the graph is not completely directed")]
    NotDirected,
    #[error("no arc {0} -> {1} to reverse")]
    MissingArc(String, String),
    #[error("the two graphs have different node sets")]
    NodeMismatch,
    #[error("mixed data unsupported")]
    MixedData,
    #[error("data error: {0}")]
    Data(String),
    #[error("{0} requires {1} data")]
    DataType(String, &'static str),
    #[error("singular correlation matrix for {0}")]
    Singular(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("value overflows the floating point range: {0}")]
    Overflow(String),
    #[error("prior knowledge conflict: {0}")]
    PriorConflict(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Data(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Data(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
