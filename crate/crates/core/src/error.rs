use thiserror::Error;

use crate::grid::Domain;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at node {index}")]
    NonFinite { index: usize },

    #[error("expected {expected:?}-domain data, got {found:?}")]
    DomainMismatch { expected: Domain, found: Domain },

    #[error("invalid exponent {0}: must be > 1 or infinite")]
    InvalidExponent(f64),

    #[error("vector field has no members")]
    EmptyField,

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid radii: {0}")]
    InvalidRadii(String),

    #[error("level must be positive, got {0}")]
    NonPositiveLevel(f64),

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("dimension {dim} unsupported: {reason}")]
    UnsupportedDimension { dim: usize, reason: &'static str },

    #[error("profile support reaches {support}, beyond the frequency extent {extent}")]
    Aliasing { support: f64, extent: f64 },

    #[error("profile `{0}` is not supported in a bounded annulus")]
    NotAnnular(String),

    #[error("profile `{0}` carries no sup bound")]
    MissingBound(String),

    #[error("invalid descent split: d'={d_prime}, d={d}")]
    InvalidSplit { d: usize, d_prime: usize },

    #[error("stencil of radius {radius} around the node leaves the cube")]
    StencilOutsideCube { radius: f64 },

    #[error("Koranyi ball of radius {radius} exits the box")]
    BallExitsBox { radius: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
