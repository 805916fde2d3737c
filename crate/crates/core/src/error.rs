use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("oracle inconsistency: {0}")]
    OracleInconsistency(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty bundle")]
    EmptyBundle,

    #[error("prox subproblem did not reach tolerance {tol:e} within {iterations} iterations (residual {residual:e})")]
    QpNotConverged {
        tol: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("point outside the function domain: {0}")]
    Domain(String),

    #[error("simplex gradient degenerate: {0}")]
    DegenerateSimplexGradient(String),

    #[error("generator certificate failed: {0}")]
    Certificate(String),

    #[error("reference prox disagrees with ground truth by {0:e}")]
    ReferenceMismatch(f64),

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
