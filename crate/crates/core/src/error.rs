use thiserror::Error;

use crate::qcore::CMat;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("subsystem index {index} out of range for {factors} factors")]
    InvalidSubsystem { index: usize, factors: usize },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("numerical instability: {0}")]
    NumericalInstability(String),
    #[error("steady state is not unique: kernel dimension {}", .kernel.len())]
    DegenerateSteadyState { kernel: Vec<CMat> },
    #[error("sideband truncation too small: weights sum to {0}")]
    TruncationTooSmall(f64),
    #[error("no bath couples to the working fluid")]
    NoCoupling,
    #[error("inconsistent sign pattern J_h={j_h:e}, J_c={j_c:e}, P={p:e}")]
    UnclassifiableState { j_h: f64, j_c: f64, p: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("cutoff {cutoff} too small: tail population {tail:e}")]
    CutoffTooSmall { cutoff: usize, tail: f64 },
    #[error("spectral gap {0:e} below tolerance")]
    DegenerateSpectrum(f64),
    #[error("state is singular where the parameter derivative is not")]
    SingularState,
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("observable does not change sign on the control grid")]
    NullNotBracketed,
    #[error("dimension {dim} exceeds limit {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("inconsistent trajectory: {0}")]
    InconsistentTrajectory(String),
    #[error("target energy {0} never reached")]
    TargetUnreached(f64),
    #[error("extractable fraction undefined for mean energy {0:e}")]
    UndefinedFraction(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
