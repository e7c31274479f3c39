use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field mismatch: sqrt({0}) vs sqrt({1})")]
    FieldMismatch(u64, u64),
    #[error("{0} is not squarefree")]
    NotSquarefree(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("parameter mismatch between operands")]
    ParamsMismatch,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("element must have exactly one component, found {0}")]
    NotSingleComponent(usize),
    #[error("truncation cutoff {cutoff} is smaller than element support radius {support}")]
    CutoffTooSmall { cutoff: usize, support: usize },
    #[error("truncations are not nested at position {0}")]
    NotNested(usize),
    #[error("measure is not lambda-invariant (defect {0})")]
    NotInvariant(f64),
    #[error("breakpoint {0} does not lie in 2*mu*Z + Z modulo 1")]
    BreakpointDomain(String),
    #[error("matrix determinant is {0}, expected +1 or -1")]
    NotUnimodular(i64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
