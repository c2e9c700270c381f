use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |A - A†| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative collapse rate {0}")]
    NegativeRate(f64),

    #[error("lab-frame Hamiltonian requires omega_0")]
    MissingOmega0,

    #[error("unknown resonance condition `{0}`")]
    UnknownCondition(String),

    #[error("correlation g({order}) undefined: mean photon number is zero")]
    UndefinedCorrelation { order: usize },

    #[error("steady-state solver did not converge (residual {residual:.3e})")]
    SolverFailure { residual: f64 },

    #[error("joint dimension {dim} exceeds max_dim {max_dim}")]
    DimensionOverflow { dim: usize, max_dim: usize },

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("eigendecomposition failed to converge")]
    EigenFailure,

    #[error("config error: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
