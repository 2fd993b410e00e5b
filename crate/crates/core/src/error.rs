use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{0}")]
    Domain(String),

    /// A numerical routine could not reach its requested tolerance.
    #[error("tolerance not met: achieved error estimate {achieved:e}, requested {requested:e}")]
    Tolerance { achieved: f64, requested: f64 },

    #[error("io: {0}")]
    Io(String),

    /// Malformed input file; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Tolerance { .. } => 1,
            Error::Domain(_) => 2,
            Error::Io(_) => 3,
            Error::Parse { .. } => 4,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
