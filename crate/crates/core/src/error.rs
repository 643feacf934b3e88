use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operator is not Hermitian: entry ({row},{col}) deviates from the conjugate of ({col},{row}) by {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension must be at least {min}, got {got}")]
    DimensionTooSmall { min: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps on {dim}x{dim} operator (residual off-diagonal norm {off_norm:e})")]
    NoConvergence {
        dim: usize,
        sweeps: usize,
        off_norm: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not unitary: max |U^dagger U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error(
        "classification is only defined for d = 3 operator triples (got d = {dim}, n = {count})"
    )]
    UnsupportedForClassification { dim: usize, count: usize },

    #[error("band closings disagree with the flat-portion census: {0}")]
    BandInconsistency(String),
}
