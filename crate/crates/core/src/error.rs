use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("malformed state: {0}")]
    MalformedState(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("no closed form available: {0}")]
    UnsupportedClosedForm(String),
}

pub type Result<T> = std::result::Result<T, Error>;
