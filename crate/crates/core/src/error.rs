use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("zero pivot in column {column}: subdiagonal is 0 but entries below it are not")]
    ZeroPivot { column: usize },
    #[error("invalid variant: {0}")]
    InvalidVariant(String),
    #[error("a blocked pivoted left-looking factorization does not exist")]
    PivotUnsupported,
    #[error("skew-tridiagonal factor is singular at row {row}")]
    SingularT { row: usize },
    #[error("matrix market: {0}")]
    MatrixMarket(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
