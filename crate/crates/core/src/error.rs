use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid lattice, basis, partition or sweep configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// A documented precondition on an input value was violated.
    #[error("contract violation: {0}")]
    Contract(String),
    /// An iterative numerical routine failed to produce a trustworthy answer.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Not enough data for a statistical estimate.
    #[error("statistics error: {0}")]
    Statistics(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line harness.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 3,
            _ => 2,
        }
    }
}
