use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("subspace is not contained in the ambient operand")]
    NotContained,
    #[error("layers do not form a direct-sum decomposition of the full space")]
    NotDirectSum,
    #[error("operation requires a nilpotent Lie algebra")]
    NotNilpotent,
    #[error("distribution is not bracket-generating")]
    NotBracketGenerating,
    #[error("grading is not verified as {0}")]
    KindMismatch(&'static str),
    #[error("product table step {0} exceeds the supported cap {1}")]
    StepCapExceeded(usize, usize),
    #[error("{0}")]
    Invalid(String),
}
