//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NschError {
    #[error("grid error: {0}")]
    Grid(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parameter validation failed:\n{0}")]
    Validation(String),

    #[error("linear solver did not converge: {context} (residual {residual:.3e} after {iterations} iterations)")]
    KrylovDiverged {
        context: String,
        residual: f64,
        iterations: usize,
    },

    #[error("non-finite value detected in {0}")]
    NanDetected(String),

    #[error("step failed after {retries} dt halvings (last dt {last_dt:.3e}): {source}")]
    StepFailed {
        retries: usize,
        last_dt: f64,
        #[source]
        source: Box<NschError>,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl NschError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        NschError::Io {
            path: path.into(),
            source,
        }
    }
}
