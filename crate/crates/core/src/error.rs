use thiserror::Error;

/// Errors raised by portfolio validation, the numerical kernels and the pricers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("portfolio contains no loans")]
    EmptyPortfolio,

    #[error("loan `{id}`: sum of squared loadings is {norm_sq}, must be < 1")]
    LoadingNormTooLarge { id: String, norm_sq: f64 },

    #[error("notional fractions sum to {sum}, expected 1 (tolerance {tolerance:e})")]
    FractionSumMismatch { sum: f64, tolerance: f64 },

    #[error("loan `{id}`: field `{field}` = {value} is out of range ({expected})")]
    FieldOutOfRange {
        id: String,
        field: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("loan `{id}`: {found} loadings given, portfolio has {expected} factors")]
    DimensionMismatch {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("argument {value} outside the domain of {function}")]
    DomainError { function: &'static str, value: f64 },

    #[error("order {order} exceeds the maximum of {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error("quadrature order {0} outside 1..=256")]
    OrderOutOfRange(usize),

    #[error("tensor grid of {nodes}^{dim} points exceeds the limit of {limit}")]
    GridTooLarge { nodes: usize, dim: u32, limit: usize },

    #[error("conditional variance {0:e} is at or below the floor")]
    DegenerateVariance(f64),

    #[error("invalid tranche [{attach}, {detach}]: need 0 <= attach < detach <= 1")]
    InvalidTranche { attach: f64, detach: f64 },

    #[error("detachment points must be strictly increasing")]
    NonMonotoneDetachments,

    #[error("portfolio has {n} loans, enumeration supports at most {max}")]
    PortfolioTooLarge { n: usize, max: usize },

    #[error("factor point has {found} components, portfolio has {expected} factors")]
    FactorDimension { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed portfolio file: {0}")]
    Parse(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
