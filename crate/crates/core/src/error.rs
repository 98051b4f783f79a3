use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("integrand returned a non-finite value at node {index}")]
    NonFiniteSample { index: usize },

    #[error("principal-value node group {group} is not symmetric about a declared singularity")]
    SingularityMismatch { group: usize },

    #[error("domain carries no quasi-metric")]
    NoMetric,

    #[error("domain carries no reference measure")]
    NoMeasure,

    #[error("ball centered at {center} with radius {radius} has zero measure")]
    EmptyBall { center: String, radius: f64 },

    #[error("filter level {level} produced no sample points")]
    EmptyLevel { level: usize },

    #[error("preimage leaves the computational window: {0}")]
    WindowEscape(String),

    #[error("no node maps into the ball centered at {center} with radius {radius}")]
    EmptyPreimage { center: String, radius: f64 },

    #[error("grid function probed outside its window at {0}")]
    InterpolationOutOfRange(String),

    #[error("bound violated: ratio {ratio} exceeds {bound} (test function: {descriptor})")]
    ViolatedBound {
        ratio: f64,
        bound: f64,
        descriptor: String,
    },

    #[error("transformed function is not an atom: {0}")]
    NotAnAtom(String),

    #[error("automorphism family declares no metric factor")]
    MissingMetricFactor,

    #[error("automorphism family declares no measure modulus")]
    MissingModulus,

    #[error("node budget exceeded: {needed} nodes requested, budget is {budget}")]
    BudgetExceeded { needed: usize, budget: usize },

    #[error("curve does not pass through the origin (gamma(0) != 0)")]
    CurveOriginViolation,

    #[error("matrix {index} is singular")]
    SingularMatrix { index: usize },

    #[error("parameter node {0} lies on or beyond the boundary margin of the unit disc")]
    BoundaryNode(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point kind mismatch: expected {expected}, got {got}")]
    PointKind { expected: &'static str, got: String },

    #[error("descriptor error: {0}")]
    Descriptor(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Descriptor(e.to_string())
    }
}
