use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bad shape: {0}")]
    BadShape(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// The ones-prepended exponent matrix is singular, so bundles do not
    /// decompose uniquely.
    #[error("singular log-linear system (scaled |det| = {scaled_det:e})")]
    SingularSystem { scaled_det: f64 },

    #[error("{what} has a non-positive coordinate at index {index}")]
    NonPositiveBundle { what: &'static str, index: usize },

    #[error("{what} has a negative coordinate at index {index}")]
    NegativeCoordinate { what: &'static str, index: usize },

    #[error("price vector has a non-positive coordinate at index {index}")]
    NonPositivePrice { index: usize },

    #[error("both bundles lie on the boundary of the orthant")]
    BothBoundary,

    /// The sum of exponentials has no minimizer over the group.
    #[error("group is not coercive: no minimizing matrix exists")]
    NotCoercive,

    #[error("wealth must be positive, got {0}")]
    ZeroWealth(f64),

    #[error("group elements belong to groups of different dimension ({left} vs {right})")]
    SpecMismatch { left: usize, right: usize },

    #[error("minimizer did not converge after {iterations} iterations (gradient {gradient:e})")]
    NotConverged { iterations: usize, gradient: f64 },

    #[error("grid would need {points:e} points (limit {limit:e})")]
    BoxTooLarge { points: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("agent {index}: {source}")]
    Agent {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Strips any agent wrapper.
    pub fn root(&self) -> &Error {
        match self {
            Error::Agent { source, .. } => source.root(),
            other => other,
        }
    }
}
