use thiserror::Error;

/// Errors produced by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("local dimension mismatch: {left} vs {right}")]
    LocalDimMismatch { left: usize, right: usize },

    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: String, right: String },

    #[error("site window {start}..={end} does not fit in {total} sites")]
    Range {
        start: usize,
        end: usize,
        total: usize,
    },

    #[error("dimension {dim} exceeds the limit of {limit}")]
    DimensionGuard { dim: usize, limit: usize },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("semigroup order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("index {index} out of range 1..={order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown charge family: {0}")]
    UnknownFamily(String),

    #[error("{family} expects {expected} weights, got {got}")]
    WeightLength {
        family: String,
        expected: usize,
        got: usize,
    },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("family {family} is not defined for {what}")]
    UnsupportedShape { family: String, what: String },

    #[error("generator is not nilpotent (residual {residual:.3e})")]
    NotNilpotent { residual: f64 },

    #[error("generator does not satisfy E^2 = {k} E (residual {residual:.3e})")]
    NotIdempotent { k: f64, residual: f64 },

    #[error("generator fails the {relation} relation (residual {residual:.3e})")]
    StructuralCondition { relation: String, residual: f64 },

    #[error("wrong kind: expected {expected}, got {got}")]
    KindMismatch { expected: String, got: String },

    #[error("spectral parameter at a pole: {0}")]
    Pole(String),

    #[error("R-matrix has arity {got}, expected {expected}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("state is not normalized (norm {norm})")]
    Unnormalized { norm: f64 },

    #[error("local operator on site {site} is singular")]
    SingularFactor { site: usize },

    #[error("invalid synthesis target: {0}")]
    InvalidTarget(String),

    #[error("relation {relation} is not applicable: {reason}")]
    Inapplicable { relation: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
