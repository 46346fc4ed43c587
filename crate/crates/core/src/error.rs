use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },

    /// The eigensolver exhausted its iteration budget.
    #[error("eigensolver failed on a {dim}x{dim} matrix after {iterations} iterations (residual {residual:e})")]
    Solver {
        dim: usize,
        iterations: usize,
        residual: f64,
    },

    /// No sign change of the manifold energy difference was found in the search bracket.
    #[error(
        "no lobe boundary between manifolds {lower} and {upper} in mu/beta range [{lo}, {hi}]"
    )]
    BoundaryNotFound {
        lower: usize,
        upper: usize,
        lo: f64,
        hi: f64,
    },

    #[error("grid is empty")]
    EmptyGrid,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}
