use thiserror::Error;

/// Errors raised while building models, running checks or parsing configs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} of {sites} sites exceeds the cap of {cap} sites; {hint}")]
    SizeLimit {
        what: &'static str,
        sites: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("site set {mask:#b} reaches outside a lattice of {sites} sites")]
    SiteOutOfRange { mask: u64, sites: usize },

    #[error("coupling entry {index}: A and A' overlap on site mask {overlap:#b}")]
    OverlappingSets { index: usize, overlap: u64 },

    #[error("duplicate {what} key at entry {index}")]
    DuplicateKey { what: &'static str, index: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value {value} at configuration {config:#b}")]
    NonFinite { config: u64, value: f64 },

    #[error("zero state vector")]
    ZeroVector,

    #[error("operator is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("internal consistency check '{what}' failed: deviation {deviation:e} > tolerance {tolerance:e}")]
    Consistency {
        what: &'static str,
        deviation: f64,
        tolerance: f64,
    },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigSyntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config field '{field}': {message}")]
    ConfigField { field: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
