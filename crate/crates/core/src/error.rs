use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid field direction {0}; expected 1, 2 or 3")]
    InvalidDirection(u8),

    #[error("invalid block label {0}; expected 1 or 2")]
    InvalidBlock(u8),

    #[error("bit value {0} is not 0 or 1")]
    InvalidBit(u8),

    #[error("field component {component} is nonzero but the field direction is {direction}")]
    FieldOffDirection { component: usize, direction: u8 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("operator is not in the block subgroup of direction {direction} (off-pattern weight {weight:e})")]
    PatternViolation { direction: u8, weight: f64 },

    #[error("direction mismatch: {0} vs {1}")]
    DirectionMismatch(u8, u8),

    #[error("invalid synthesis problem: {0}")]
    InvalidProblem(String),

    #[error("no Z^a X^b correction restores the input for {0}")]
    ProtocolBreakage(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
