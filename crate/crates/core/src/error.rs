use thiserror::Error;

/// Violated polygon invariant, reported with the first offending vertex.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolygonError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {index} is not finite")]
    NonFinite { index: usize },
    #[error("vertex {index} repeats vertex {other}")]
    RepeatedVertex { index: usize, other: usize },
    #[error("turn at vertex {index} is not strictly counterclockwise (cross product {cross:e})")]
    NotStrictlyConvex { index: usize, cross: f64 },
    #[error("vertices wind more than once around the interior (total turning {turning:.6} rad)")]
    SelfOverlapping { turning: f64 },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    Polygon(#[from] PolygonError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("cost cap exceeded: {0}")]
    CostCap(String),
    #[error("no dilation in [{lo}, {hi}] meets the bound 1/{u}; best candidate rho = {best_rho} with max |sin| = {best_value:.6}")]
    DipNotFound {
        u: u64,
        lo: u64,
        hi: u64,
        best_rho: u64,
        best_value: f64,
    },
    #[error("generator gave up after {attempts} degenerate draws")]
    Generation { attempts: usize },
    #[error("malformed polygon file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
