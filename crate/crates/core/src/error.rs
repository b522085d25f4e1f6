use thiserror::Error;

/// Errors surfaced by the library and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("square root of negative rational {0}")]
    NegativeRadicand(String),

    #[error("could not decompose {value} into square and squarefree parts (trial bound {bound})")]
    Factorization { value: String, bound: u64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("code is not normalized: {0}")]
    NotNormalized(String),

    #[error("p = {p} is outside the validity range p < p0 = {p0}")]
    OutOfRange { p: String, p0: String },

    #[error("no solution found after {restarts} restarts (best residual {best_residual:e})")]
    NoSolution { restarts: usize, best_residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("qubit count {n} exceeds the dense limit {limit}")]
    TooManyQubits { n: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
