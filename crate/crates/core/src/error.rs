use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma pole at {re}{im:+}i")]
    Pole { re: f64, im: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate direction: projected scale is zero")]
    DegenerateDirection,

    #[error("tail index mismatch: {0} vs {1}")]
    AlphaMismatch(f64, f64),

    #[error("spectral support has mixed signs in coordinate {coordinate}")]
    MixedSignSupport { coordinate: usize },

    #[error("insufficient exceedances: {found} found, at least {required} required")]
    InsufficientExceedances { found: usize, required: usize },

    #[error("root bracket not found for target {target}")]
    BracketFailure { target: f64 },

    #[error("quadrature did not converge (estimated error {error:e})")]
    QuadratureFailure { error: f64 },

    #[error("series did not converge after {terms} terms")]
    SeriesDivergence { terms: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
