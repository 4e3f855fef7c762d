use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("singular matrix: pivot {pivot} below tolerance")]
    SingularMatrix { pivot: usize },

    #[error("group {group} has no observations")]
    EmptyGroup { group: usize },

    #[error("design matrix is rank deficient at column {column}")]
    RankDeficient { column: usize },

    #[error("invalid arity: {0}")]
    InvalidArity(String),

    #[error("leverage of observation {index} is one; the observation is interpolated exactly")]
    LeverageOne { index: usize },

    #[error("Wald core matrix is numerically singular")]
    SingularWaldCore,

    #[error("hypothesis matrix is not a valid {0}")]
    InvalidHypothesis(String),

    #[error("unknown distribution `{0}`")]
    UnknownDistribution(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("replicate {replicate} (seed {seed}) of scenario [{scenario}] failed: {source}")]
    Replicate {
        scenario: String,
        replicate: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures caused by the numbers (singularity, leverage one) rather
    /// than by malformed input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::SingularMatrix { .. }
            | Error::RankDeficient { .. }
            | Error::LeverageOne { .. }
            | Error::SingularWaldCore => true,
            Error::Replicate { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
