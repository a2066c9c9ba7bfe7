use thiserror::Error;

/// Errors shared by every analysis module in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not symmetric: asymmetry {asym:e} exceeds {tol:e} (relative)")]
    NotSymmetric { asym: f64, tol: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eig:e})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {min_eig:e} below clamp threshold {threshold:e}")]
    NotPsd { min_eig: f64, threshold: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no power up to {n_max} is a contraction; spectral radius {rho}")]
    NotContractiveWithinBudget { n_max: usize, rho: f64 },

    #[error("precondition failed: {what} (measured value {value:e})")]
    PreconditionFailed { what: &'static str, value: f64 },

    #[error("word enumeration budget exceeded: {requested} words, cap {cap}")]
    BudgetExceeded { requested: u128, cap: u64 },

    #[error("invalid letter {letter}: alphabet is 1..={k}")]
    InvalidLetter { letter: u8, k: usize },

    #[error("unsupported dimension d={d}: {hint}")]
    WrongDimension { d: usize, hint: &'static str },

    #[error("unsupported alphabet size K={k}: {hint}")]
    WrongAlphabet { k: usize, hint: &'static str },

    #[error("Lyapunov certificate is not valid (worst margin {worst_margin:e})")]
    InvalidCertificate { worst_margin: f64 },

    #[error("word must be nonempty")]
    EmptyWord,

    #[error("invalid distribution: {reason}")]
    InvalidDistribution { reason: String },

    #[error("invalid run-length schedule: {reason}")]
    InvalidSchedule { reason: &'static str },

    #[error("horizon must be at least 1")]
    HorizonZero,

    #[error("limit probes did not converge: residual {residual:e} (threshold {tol:e})")]
    NotConverged { residual: f64, tol: f64 },

    #[error("trajectory inconsistent with the norm dichotomy: {detail}")]
    InconsistentWithDichotomy { detail: String },

    #[error("eigenvalue iteration failed to converge")]
    EigenFailed,
}

pub type Result<T> = std::result::Result<T, Error>;
