use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range 0..={max}")]
    Range { index: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("internal contract violated: {0}")]
    Internal(String),

    #[error("search domain too small (optimum on boundary); try radius >= {suggested_radius}")]
    Resolution { suggested_radius: f64 },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("path diverged at step {step} (norm {norm:e})")]
    Divergence { step: usize, norm: f64 },

    #[error("unsupported dimension {dim} (max {max})")]
    UnsupportedDimension { dim: usize, max: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Shape { expected, got })
    }
}
