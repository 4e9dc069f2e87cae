use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Hurst parameter {0} outside [0.5, 1)")]
    InvalidHurst(f64),

    #[error("H = 1/2 is the classical Brownian case and is rejected by {op}")]
    ClassicalHurstRejected { op: &'static str },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("negative time {0} outside the process domain")]
    NegativeTime(f64),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("covariance factorization failed at pivot {pivot}: matrix is not positive definite")]
    FactorizationFailed { pivot: usize },

    #[error(
        "circulant embedding failed: eigenvalue {value:.6e} at index {index} is below -{tolerance:.6e}; \
         fall back to the Cholesky generator"
    )]
    EmbeddingFailed {
        index: usize,
        value: f64,
        tolerance: f64,
    },

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("series too short: {got} samples, need at least {min}")]
    SeriesTooShort { got: usize, min: usize },

    #[error("non-finite value in input series")]
    NonFiniteInput,

    #[error("degenerate series: zero mean-square increment at lag {lag}")]
    DegenerateSeries { lag: usize },

    #[error("state diverged (non-finite) at step {step}")]
    Divergence { step: usize },

    #[error(
        "quadrature failed to reach relative tolerance {requested:.1e}: \
         achieved {achieved:.1e} with {panels} panels"
    )]
    QuadratureNonConvergence {
        requested: f64,
        achieved: f64,
        panels: usize,
    },

    #[error("invalid epsilon {epsilon}: must lie in (0, {epsilon_0}]")]
    InvalidEpsilon { epsilon: f64, epsilon_0: f64 },

    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),

    #[error("{divergent} of {total} replicates diverged (limit is 1%)")]
    TooManyDivergent { divergent: usize, total: usize },

    #[error("coefficient spot check failed: {0}")]
    CoefficientCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
