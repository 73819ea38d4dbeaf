use thiserror::Error;

/// Errors raised anywhere in the convexity pipeline.
///
/// The CLI maps [`Error::is_usage`] variants to exit status 1 and every other
/// variant to exit status 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("variable `{name}` refers to index {index} but the field has dimension {dimension}")]
    VariableOutOfRange {
        name: String,
        index: usize,
        dimension: usize,
    },

    #[error("domain error in `{node}`: {detail}")]
    Domain { node: String, detail: String },

    #[error("stencil leaves the domain at {point:?}: {detail}")]
    Boundary { point: Vec<f64>, detail: String },

    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParameter { name: String, detail: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by malformed user input rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Usage(_)
                | Error::Syntax { .. }
                | Error::UnknownFunction { .. }
                | Error::UnknownIdentifier { .. }
                | Error::VariableOutOfRange { .. }
                | Error::UnknownBuiltin(_)
                | Error::InvalidParameter { .. }
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
