use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (entry ({row}, {col}))")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("matrix is ill-conditioned (condition number {condition:e} exceeds 1e12)")]
    IllConditioned { condition: f64 },

    #[error("non-finite input value")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("enumeration exceeded {limit} lattice points")]
    EnumerationLimit { limit: usize },

    #[error("non-finite integrand value at a sample point")]
    NonFiniteIntegrand,

    #[error("incomplete embedding data: degree {degree} but {found} period matrices")]
    IncompleteEmbeddingData { degree: usize, found: usize },

    #[error("period matrix is not reduced; call `siegel::reduce` first")]
    NotReduced,
}
