use thiserror::Error;

/// Errors raised by the library. The CLI maps all of them to exit status 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("axis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("indices {i} and {j} must be distinct and absent from the complement tuple")]
    BetweenSign { i: usize, j: usize },

    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid form layout: degree {p} in dimension {d}")]
    InvalidLayout { d: usize, p: usize },

    #[error("gradient is singular at |A| = 0 (d\u{2113}/dr(u, 0) = {slope})")]
    SingularGradient { slope: f64 },

    #[error("state outside the model domain: {0}")]
    Domain(String),

    #[error("metric is singular or not symmetric")]
    SingularMetric,

    #[error("grid too small: every axis needs at least 3 samples, got {0:?}")]
    GridTooSmall(Vec<usize>),

    #[error("flow leaves the support margin: |eps| * max|xi| = {reach} exceeds {margin}")]
    FlowExitsGrid { reach: f64, margin: f64 },

    #[error("expression error: {0}")]
    Expression(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
