use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (max |m - m^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("state is not normalized: {0}")]
    NotNormalized(String),

    #[error("invalid subsystem index {index} for {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("dimension {0} is not prime; load a custom basis set with --load instead")]
    NotPrime(usize),

    #[error("basis count M = {m} out of range 2..={max} for d = {d}")]
    BasisCount { d: usize, m: usize, max: usize },

    #[error("basis index theta = {theta} out of range 1..={m}")]
    ThetaOutOfRange { theta: usize, m: usize },

    #[error("MUB validation failed: {0}")]
    MubValidation(String),

    #[error("parameter out of range: {0}")]
    ParameterRange(String),

    #[error("invalid qubit index: {0}")]
    BadQubit(String),

    #[error("rank {rank} invalid for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("attenuation factor for {setting} is {value}, must be positive")]
    Attenuation { setting: &'static str, value: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
