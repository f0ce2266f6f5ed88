use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported matrix dimension {0} (expected 2, 4 or 8)")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Bloch vector norm {norm} is not a unit vector")]
    NotUnitVector { norm: f64 },

    #[error("Bloch vector norm {norm} exceeds 1")]
    BlochOutsideBall { norm: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid measurement outcome {0} (expected +1 or -1)")]
    InvalidOutcome(i32),

    #[error("invalid qubit indices {indices:?} for a {nqubits}-qubit register")]
    BadIndices { indices: Vec<usize>, nqubits: usize },

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("chain length {0} outside 1..={max}", max = crate::temporal::MAX_CHAIN_LEN)]
    ChainLength(usize),

    #[error("empty step selection")]
    EmptySelection,

    #[error("step index {index} out of range for a chain of length {len}")]
    StepOutOfRange { index: usize, len: usize },

    #[error("trial count must be at least 1")]
    ZeroTrials,

    #[error("correlation {0} outside [-1, 1]")]
    CorrelationOutOfRange(f64),

    #[error("degenerate settings: b1 and b2 are parallel or antiparallel")]
    DegenerateSettings,

    #[error("bound violated: {quantity} = {value} exceeds {bound}")]
    BoundViolation {
        quantity: &'static str,
        value: f64,
        bound: f64,
    },
}
