use alloc::string::String;

/// Errors produced by the core simulator.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid constraint graph: {0}")]
    InvalidGraph(String),

    #[error("undefined fraction: the graph has no edges")]
    UndefinedFraction,

    #[error("instance too large for exhaustive oracle: {k}^{n} colorings exceed budget {budget}")]
    BudgetExceeded { k: usize, n: usize, budget: u64 },

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension guard exceeded: {dim} > {limit}")]
    DimensionGuard { dim: usize, limit: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid formula: {0}")]
    InvalidFormula(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degree target {target} is below the maximum degree {max_degree}")]
    DegreeTooSmall { target: usize, max_degree: usize },

    #[error("eta must lie in (0, 1], got {0}")]
    InvalidEta(f64),

    #[error("the near-proper case bound needs a declared regularity d")]
    MissingRegularity,

    #[error("soundness analysis anomaly: {0}")]
    Anomaly(String),
}

pub type Result<T> = core::result::Result<T, Error>;
