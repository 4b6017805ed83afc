use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice dimension {rows}x{cols}: both sides must be at least 2")]
    InvalidDimension { rows: usize, cols: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{what}: generation failed after {attempts} attempts (seed {seed:#018x})")]
    GenerationFailed {
        what: &'static str,
        seed: u64,
        attempts: usize,
    },

    #[error("malformed item: {0}")]
    ItemDefinition(String),

    #[error("render error: {0}")]
    Render(String),

    #[error("unknown question format: {0}")]
    UnknownFormat(String),

    #[error("aggregation error: {0}")]
    Aggregation(String),
}

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
