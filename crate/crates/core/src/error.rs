use thiserror::Error;

/// Errors raised by the library. The variants map onto CLI exit codes:
/// parse failures are input errors, precondition and dimension failures are
/// caller errors, numerical failures are nonconvergence.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<S: Into<String>>(ok: bool, msg: S) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(msg.into()))
    }
}
