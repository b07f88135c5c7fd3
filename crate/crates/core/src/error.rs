use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("the inverse Rosenblatt transform is not available for {0}; use rejection sampling")]
    UnsupportedTransform(&'static str),

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("Sobol' dimension {requested} exceeds the direction-number table limit of {limit}")]
    SobolDimension { requested: usize, limit: usize },

    #[error("polygon acceptance rate {rate:.2e} is below 1e-3 of its bounding box")]
    DegeneratePolygon { rate: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("exponent q = {0} is not supported here (requires q >= 2)")]
    UnsupportedExponent(f64),

    #[error("non-finite value during {0}; rescale the coordinates or lower q")]
    NonFinite(&'static str),

    #[error("{n} points exceed the {limit}-point limit of {what}; subsample the candidates")]
    TooLarge { what: &'static str, n: usize, limit: usize },

    #[error("slack radius is negative ({0:.3e}); recompute the per-point minimax profile")]
    StaleSlack(f64),

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical routines, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_) | Error::StaleSlack(_) | Error::DegeneratePolygon { .. }
        )
    }
}
