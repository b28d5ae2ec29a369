use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge: estimate {estimate:e}, achieved error bound {achieved:e} (requested {requested:e})")]
    Quadrature {
        estimate: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("finite-difference stencil reaches t = {lowest:e} <= 0 (t = {t}, step = {step:e}, order {order})")]
    StencilCrossesZero {
        t: f64,
        step: f64,
        order: usize,
        lowest: f64,
    },

    #[error("too few Monte Carlo samples: {got} < {min}")]
    TooFewSamples { got: usize, min: usize },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("unknown experiment `{id}`; known experiments: {known}")]
    UnknownExperiment { id: String, known: String },

    #[error("failed to read `{path}`: {source}")]
    ReadFile {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
