use thiserror::Error;

/// Errors raised by the geometry, metric, mapping and construction modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("self-intersecting boundary: edge {first} crosses edge {second}")]
    SelfIntersection { first: usize, second: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point ({x}, {y}) is outside the admissible region: {reason}")]
    OutsideDomain { x: f64, y: f64, reason: String },

    #[error("no interior nodes for grid spacing {h}")]
    NoInteriorNodes { h: f64 },

    #[error("numerical failure after {iterations} iterations (residual {residual:e}): {reason}")]
    Numerical {
        iterations: usize,
        residual: f64,
        reason: String,
    },

    #[error("crosscuts {first:?} and {second:?} intersect")]
    CrosscutIntersection {
        first: (u32, u32),
        second: (u32, u32),
    },

    #[error("construction invariant violated: {0}")]
    Construction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
