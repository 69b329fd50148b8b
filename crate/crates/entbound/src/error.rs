use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tensor structure: {0}")]
    InvalidStructure(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state is not normalized (|norm - 1| = {0:.3e})")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("trace is not one (deviation {0:.3e})")]
    TraceNotOne(f64),
    #[error("tensor structures do not match")]
    StructureMismatch,
    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystems(String),
    #[error("measured mean {mean} lies outside the spectral range [{min}, {max}]")]
    MeanOutOfRange { mean: f64, min: f64, max: f64 },
    #[error("rejection sampling exhausted after {0} attempts")]
    RejectionExhausted(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("stabilizer generators do not commute")]
    NonCommutingGenerators,
    #[error("stabilizer generators are not independent")]
    DependentGenerators,
    #[error("empty measurement record")]
    EmptyRecord,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
