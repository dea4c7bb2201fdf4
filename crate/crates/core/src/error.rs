use thiserror::Error;

/// Errors produced by the estimation, clustering and evaluation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("row {row} has zero norm; cosine similarity is undefined")]
    ZeroVector { row: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("class {class} has no members")]
    EmptyClass { class: usize },
    #[error("invalid shape: {0}")]
    Shape(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("off-diagonal similarities have zero spread; z-scoring is undefined")]
    DegenerateSpread,
    #[error("row {row} has zero degree")]
    ZeroDegree { row: usize },
    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },
    #[error("eigenvalue iteration did not converge for index {index}")]
    NoConvergence { index: usize },
    #[error("spectrum of length {len} is too short for window {window}")]
    SpectrumTooShort { len: usize, window: usize },
    #[error("fewer than two spectral differences available for threshold statistics")]
    InsufficientStatistics,
    #[error("requested {k} clusters for {n} points")]
    KTooLarge { k: usize, n: usize },
    #[error("at least {required} points are required, got {n}")]
    TooFewPoints { n: usize, required: usize },
    #[error("value {value} outside the open interval (0, 1)")]
    OutOfRange { value: f64 },
    #[error("metric requires at least two clusters")]
    SingleCluster,
    #[error("metric requires more points than clusters")]
    Saturated,
    #[error("input sequence has zero variance")]
    ZeroVariance,
    #[error("could not place {k} centers with separation {min_sep} rad in {d} dimensions")]
    InfeasibleSeparation { k: usize, d: usize, min_sep: f64 },
    #[error("{n} points exceed the enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
