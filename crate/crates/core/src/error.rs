use thiserror::Error;

/// Errors produced by the field, matrix, code and simulation layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    BadDegree(u32),
    #[error("field order {p}^{h} exceeds the cap of {cap}")]
    FieldTooLarge { p: u64, h: u32, cap: u32 },
    #[error("invalid field spec {0:?}: expected `p^h` or a bare prime")]
    BadFieldSpec(String),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("element index {index} out of range for GF({q})")]
    ElementOutOfRange { index: u64, q: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrices are defined over different fields")]
    FieldMismatch,
    #[error("matrix is singular")]
    Singular,
    #[error("column index {index} out of range for {cols} columns")]
    ColumnOutOfRange { index: usize, cols: usize },
    #[error("column indices must be strictly increasing")]
    ColumnsNotIncreasing,
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("subset enumeration needs {needed} subsets, cap is {cap}")]
    EnumerationCap { needed: u128, cap: u64 },
    #[error("matrix is not in supplemented shape: {0}")]
    NotSupplemented(String),
    #[error("need {needed} distinct shares, got {got}")]
    NotEnoughShares { needed: usize, got: usize },
    #[error("duplicate share index {0}")]
    DuplicateShare(usize),
    #[error("shares carry inconsistent symbol counts")]
    InconsistentShares,
    #[error("decoding system is singular; shares are corrupt or mismatched")]
    CorruptShares,
    #[error("word has {got} symbols, expected {expected}")]
    WordLength { expected: usize, got: usize },
    #[error("padding record does not match the symbol stream: {0}")]
    BadPadding(String),
    #[error("malformed matrix text: {0}")]
    MatrixFormat(String),
    #[error("malformed share frame: {0}")]
    Frame(String),
    #[error("invalid simulation config: {0}")]
    SimConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
