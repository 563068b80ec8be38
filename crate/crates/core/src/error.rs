use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("first homology is infinite")]
    InfiniteHomology,
    #[error("first homology is not cyclic (invariant factors {0:?})")]
    NotCyclic(Vec<String>),
    #[error("{0} does not generate first homology")]
    NotGenerator(String),
    #[error("lattice is not negative definite")]
    NotNegativeDefinite,
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
