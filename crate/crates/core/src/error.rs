use thiserror::Error;

/// Errors raised by the library. Domain errors reject inputs outside the
/// supported parameter range; numerical errors report a failed iteration
/// together with the last point or bracket it reached.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical error: {msg} (at {at})")]
    Numerical { msg: String, at: String },
    #[error("no bound state: {0}")]
    NoBoundState(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numerical(msg: impl Into<String>, at: impl std::fmt::Debug) -> Self {
        Error::Numerical {
            msg: msg.into(),
            at: format!("{at:?}"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
