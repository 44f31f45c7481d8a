use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("tensor shape mismatch: expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("value {0} is not 0 or 1")]
    NonBinary(i64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("polynomial degree {degree} exceeds bound {bound}")]
    DegreeOverflow { degree: usize, bound: usize },
}

impl Error {
    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        Error::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
