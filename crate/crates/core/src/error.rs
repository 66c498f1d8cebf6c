use thiserror::Error;

/// Errors raised by constructors and checked operations.
///
/// Paper claims that turn out false are *not* errors: they come back as a
/// [`crate::Certificate`] with a `Refuted` verdict. Errors are reserved for
/// malformed input and violated preconditions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix: det(E) = 0")]
    SingularMatrix,
    #[error("matrix not admissible: {0}")]
    Inadmissible(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("budget exceeded: {required} leaves or vertices required, budget is {budget}")]
    Budget { required: u64, budget: u64 },
    #[error("profile construction failed: {0}")]
    Profile(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
