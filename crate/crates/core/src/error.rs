use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("m = {0} must exceed 1")]
    MTooSmall(i64),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("generator search exhausted its bound for an ideal of norm {norm}")]
    SearchBoundExceeded { norm: String },
    #[error("the prime above {0} has no generator")]
    NonPrincipalGenerator(String),
    #[error("invalid ramification set: {0}")]
    InvalidRamification(String),
    #[error("exponent m is not determined for |S| = {size}")]
    AmbiguousM { size: usize, candidates: Vec<String> },
    #[error("place {0} is not ramified in B")]
    NotRamifiedInB(String),
    #[error("parameter out of domain: {0}")]
    DomainError(String),
    #[error("no table entry for degree {0}")]
    TableGap(u32),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("{0} is not a possible torsion order for this field")]
    ImpossibleOrder(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
