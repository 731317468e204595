use thiserror::Error;

/// Errors raised by constructions and checks.
///
/// Violated axioms and failed inequalities are never errors; they are
/// reported as rows of a [`crate::CheckReport`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("unknown unit {0}")]
    UnknownUnit(String),
    #[error("composite of {left} and {right} is not in the enumerated view")]
    Budget { left: String, right: String },
    #[error("{left} and {right} are not composable")]
    NotComposable { left: String, right: String },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("shape mismatch at {arrow}: expected {expected}, found {found}")]
    Shape {
        arrow: String,
        expected: String,
        found: String,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
