use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid ball: {0}")]
    InvalidBall(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bracket growth exhausted while solving modular({lo:e}, {hi:e}) = 1")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("numerical failure in {op}: {detail}")]
    Numerical { op: String, detail: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn numerical(op: &str, detail: impl Into<String>) -> Self {
        Error::Numerical {
            op: op.to_string(),
            detail: detail.into(),
        }
    }
}
