use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {d} is outside the supported range 2..={max}")]
    DimensionOutOfRange { d: usize, max: usize },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not special unitary (|det - 1| = {deviation:.3e})")]
    NotSpecialUnitary { deviation: f64 },

    #[error("coefficient matrix is singular (|det| = {abs_det:.3e}); the sector decomposition is undefined")]
    SingularCoefficientMatrix { abs_det: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("strategy {strategy} requires d = 2 (got d = {d})")]
    UnsupportedStrategy { strategy: String, d: usize },

    #[error("overlap modulus {modulus} exceeds 1 beyond tolerance")]
    OverlapOutOfRange { modulus: f64 },

    #[error("exhaustive enumeration refused for d = {d}: the eigenphase grid grows as steps^(d-1); use d <= 4")]
    GridTooLarge { d: usize },

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
