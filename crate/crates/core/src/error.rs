use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("iterated coproduct needs n >= 1")]
    ZeroArity,
    #[error("variable index {index} out of range for dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },
    #[error("slot {slot} out of range for arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid graph: {0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpError {
    #[error("expected {expected} structure tensors, got {got}")]
    TensorCount { expected: usize, got: usize },
    #[error("tensor dimension {got} does not match {expected}")]
    TensorDimension { expected: usize, got: usize },
    #[error("cochain arity mismatch: {0}")]
    Arity(String),
    #[error("cochain has no recorded bounds")]
    MissingBounds,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("coincident points")]
    Coincident,
    #[error("non-positive scale coordinate {0}")]
    NonPositiveScale(f64),
    #[error("malformed sample: {0}")]
    MalformedSample(String),
    #[error("invalid propagator parameters: {0}")]
    Params(String),
    #[error("evaluation on the singular locus")]
    Singular,
    #[error("edge budget {budget} differs from chart dimension {dim}")]
    NotTopDegree { budget: usize, dim: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuantizeError {
    #[error("missing weight for graph {0}")]
    MissingWeight(String),
    #[error("weight table mixes propagator profiles {0} and {1}")]
    MixedProfiles(String, String),
    #[error("weight table line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("input is not a Lie bialgebra: {0}")]
    NotBialgebra(String),
    #[error(transparent)]
    Op(#[from] OpError),
}
