use std::path::PathBuf;

use factorgen_core::scoring::Subtest;
use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] factorgen_core::Error),

    #[error("{subtest} item {index} (seed {seed:#018x}): {source}")]
    Generation {
        subtest: Subtest,
        index: usize,
        seed: u64,
        source: factorgen_core::Error,
    },

    #[error("template `{template}`: {message}")]
    Template { template: String, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("malformed {what}: {source}")]
    Parse { what: String, source: serde_json::Error },
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }

    pub fn parse(what: impl Into<String>) -> impl FnOnce(serde_json::Error) -> HarnessError {
        let what = what.into();
        move |source| HarnessError::Parse { what, source }
    }
}
