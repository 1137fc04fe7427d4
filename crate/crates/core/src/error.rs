use thiserror::Error;

use crate::estimators::FitResult;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("objective is not finite ({value}) at {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },

    #[error("degenerate frequency rates: {0}")]
    Degenerate(String),

    #[error(
        "periodogram-type scan produced {found} peak(s) but {requested} were requested; \
         close or weak components cannot be initialized jointly, use a sequential fit instead"
    )]
    PeakShortfall { requested: usize, found: usize },

    #[error("sequence has zero variance")]
    ZeroVariance,

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: usize,
        partial: Box<FitResult>,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonFinite { .. }
            | Error::Degenerate(_)
            | Error::PeakShortfall { .. }
            | Error::ZeroVariance => true,
            Error::Stage { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
