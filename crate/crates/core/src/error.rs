use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("columns are linearly dependent (rank {rank} < {expected})")]
    RankDeficient { rank: usize, expected: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("result is not integral: {0}")]
    NotIntegral(String),
    #[error("lattice is degenerate")]
    Degenerate,
    #[error("lattice is not even")]
    NotEven,
    #[error("lattice is not definite")]
    NotDefinite,
    #[error("unknown lattice name `{0}`")]
    UnknownName(String),
    #[error("budget exceeded: {what} ({size} > {limit})")]
    BudgetExceeded { what: &'static str, size: u128, limit: u128 },
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("subgroup is not isotropic; offending element {element:?}")]
    NotIsotropic { element: Vec<u64> },
    #[error("overlattice construction produced a non-integral Gram matrix")]
    NonIntegralResult,
    #[error("discriminants are not coprime (gcd {gcd})")]
    NotCoprime { gcd: u128 },
    #[error("characteristic {0} is not allowed here")]
    BadCharacteristic(u64),
    #[error("ambient lattice cannot hold the given signature: {0}")]
    IncompatibleSignature(String),
    #[error("expected {expected} eigenvalues, got {got}")]
    WrongSize { expected: usize, got: usize },
    #[error("trace {0} is not a rational integer")]
    NonRationalTrace(String),
    #[error("p-rank must be 1 or 2, got {0}")]
    BadPRank(u32),
    #[error("component {index} is not a simple component of a fiber of type {fiber}")]
    InvalidComponent { fiber: String, index: usize },
    #[error("code contains no word of full weight")]
    NoWeight9Word,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
