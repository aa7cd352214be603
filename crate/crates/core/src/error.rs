use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mass must be positive and finite, got {0}")]
    NonPositiveMass(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular matrix (|det| = {det:e}, condition estimate {condition:e})")]
    Singular { det: f64, condition: f64 },

    #[error("operator order overflow: result would have order {0} (max 2)")]
    OrderOverflow(usize),

    #[error("operand order {0} not supported here (max {1})")]
    OrderTooHigh(usize, usize),

    #[error("coefficient is not unitary at p = {p:?} (deviation {deviation:e})")]
    NonUnitary { p: [f64; 3], deviation: f64 },

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("no {variant} variant exists for {name}")]
    UnknownVariant { name: String, variant: String },

    #[error("empty sample list")]
    EmptySamples,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("grid too narrow: {0}")]
    GridTooNarrow(String),

    #[error("parse error: {0}")]
    Parse(String),
}
