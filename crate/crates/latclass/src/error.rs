use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gram matrix is not square (row {row} has {len} entries, expected {expected})")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("gram matrix is not symmetric at ({i},{j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("gram matrix is not positive definite: leading minor {index} equals {minor}")]
    NotPositiveDefinite { index: usize, minor: String },
    #[error("unknown lattice name `{0}`")]
    UnknownLattice(String),
    #[error("invalid rank {rank} for family {family}")]
    InvalidRank { family: String, rank: usize },
    #[error("resource cap exceeded: {what} (cap {cap})")]
    CapExceeded { what: String, cap: u64 },
    #[error("search budget exhausted: {0}")]
    BudgetExceeded(String),
    #[error("vector must be nonzero")]
    ZeroVector,
    #[error("subgroup is not isotropic: {0}")]
    NotIsotropic(String),
    #[error("result is not integral")]
    NotIntegral,
    #[error("sublattice is not saturated")]
    NotSaturated,
    #[error("embedding is not an isometry: {0}")]
    NotIsometric(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("inconsistent request: {0}")]
    Inconsistent(String),
    #[error("malformed input at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
