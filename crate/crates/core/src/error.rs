use thiserror::Error;

use crate::channel::Variant;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation requires a {expected:?} channel, got {found:?}")]
    WrongVariant { expected: Variant, found: Variant },

    #[error("resource guard: required dimension {required} exceeds cap {cap} (set MOELAB_MAX_DIM to raise it)")]
    ResourceGuard { required: usize, cap: usize },

    #[error("trial {trial} failed: {message}")]
    TrialFailed { trial: u64, message: String },
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
