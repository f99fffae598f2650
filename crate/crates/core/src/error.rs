use thiserror::Error;

/// Errors raised by the algebra operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("element is not hermitian (|x - x*| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("element is not in the positive cone (min spectral value {min:e})")]
    NotPositive { min: f64 },
    #[error("element is not order-bounded")]
    NotBounded,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("domination violated at term {index}: {detail}")]
    DominationViolated { index: usize, detail: String },
    #[error("series tail is not summable (ratio {ratio})")]
    SeriesDiverges { ratio: f64 },
    #[error("sequence is not increasing at term {index}")]
    NotIncreasing { index: usize },
    #[error("sequence term {index} is not dominated by the bound")]
    NotDominated { index: usize },
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("no states supplied")]
    NoStates,
    #[error("state does not apply to this model")]
    StateMismatch,
    #[error("invalid point label {0:?}")]
    InvalidPoint(String),
    #[error("tail expression: {0}")]
    Expr(String),
    #[error("{field}: {message}")]
    Schema { field: String, message: String },
    #[error("linear algebra failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
