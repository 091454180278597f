use thiserror::Error;

/// Errors raised by the library. Each variant corresponds to a distinct
/// failure class so that front ends can map them onto exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty group spec")]
    EmptyGroupSpec,
    #[error("invalid cyclic order {0}: every factor order must be at least 1")]
    InvalidOrder(i64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("enumeration bound exceeded: group order {order} > bound {bound}")]
    BoundExceeded { order: u64, bound: u64 },
    #[error("not a character: {0}")]
    NotACharacter(String),
    #[error("not a character of second degree: {0}")]
    NotSecondDegree(String),
    #[error("invalid symmetric homomorphism: {0}")]
    InvalidSymHom(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("not isotropic: {0}")]
    NotIsotropic(String),
    #[error("wrong cardinality: expected {expected}, got {got}")]
    WrongCardinality { expected: usize, got: usize },
    #[error("not a stabilizer group: {0}")]
    NotStabilizerGroup(String),
    #[error("not a stabilizer state")]
    NotStabilizerState,
    #[error("not in the same fiber")]
    NotInSameFiber,
    #[error("zero state vector")]
    ZeroState,
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("invalid density operator: {0}")]
    InvalidDensity(String),
    #[error("character of second degree is not defined on the whole group")]
    NotTotal,
    #[error("invalid concave function: {0}")]
    InvalidConcaveFn(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("theory check violated: {0}")]
    TheoryViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
