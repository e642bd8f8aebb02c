use thiserror::Error;

/// Errors produced by the dilation toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("scalar mode mismatch: cannot combine exact and float operands")]
    ModeMismatch,

    #[error("invalid norm exponent {0}: p must be a rational number greater than 1")]
    InvalidExponent(String),

    #[error("exact p-th powers need an integer exponent, got p = {0}")]
    NonIntegerExponent(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid convex combination: {0}")]
    InvalidCombination(String),

    #[error("operator `{0}` is not an invertible isometry of the underlying space")]
    NotAnIsometry(String),

    #[error("operator is not a contraction: norm {norm} exceeds {bound}")]
    NotAContraction { norm: f64, bound: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cap exceeded: {what} = {value} > {cap}")]
    CapExceeded { what: &'static str, value: u128, cap: u128 },

    #[error("unknown operator label `{0}`")]
    UnknownLabel(String),

    #[error("readout and embedding scales differ on block {0}; the composition is not rational")]
    IrrationalComposition(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
