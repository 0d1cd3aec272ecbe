use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("sample {index}: {source}")]
    Sample {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True for failures of the numerics (singular systems, bad grids)
    /// rather than of caller-supplied parameters.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Singular(_) | Error::InvalidGrid(_) => true,
            Error::Sample { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
