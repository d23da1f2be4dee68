use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("monomial count binomial({n}+{d}, {n}) overflows")]
    CountOverflow { n: usize, d: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {index} lies outside the closed unit ball (norm {norm})")]
    OutsideBall { index: usize, norm: f64 },

    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("minimal separation needs at least two points, got {0}")]
    SeparationUndefined(usize),

    #[error("exact covering refused for {size} points (threshold {threshold})")]
    ExactCoverRefused {
        size: usize,
        threshold: usize,
        fallback: crate::geometry::CoveringResult,
    },

    #[error("vertex enumeration budget exceeded: {0}")]
    OracleBudget(String),

    #[error("point set is not norming for degree {d}")]
    NotNorming { d: usize },

    #[error("linear program failed numerically: {0}")]
    Numerical(String),

    #[error("derivative order {order} exceeds the continuity order {limit} of the bump")]
    SmoothnessExceeded { order: usize, limit: usize },

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("certification direction mismatch: {0}")]
    Certification(String),

    #[error("bound sandwich violated: {0}")]
    SandwichViolation(String),

    #[error("line {line}, field {field}: {message}")]
    Parse { line: usize, field: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
