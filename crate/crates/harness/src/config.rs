//! Endpoint and corpus configuration, read from a TOML file.
//!
//! ```toml
//! [corpus]
//! difficulty = "normal"
//! master_seed = 7
//!
//! [[endpoint]]
//! name = "local"
//! transport = { kind = "http", url = "http://127.0.0.1:8000/v1/chat/completions", model = "m", api_key_env = "API_KEY" }
//! ```
//!
//! Credentials are never stored in the file; `api_key_env` names the
//! environment variable that holds them.

use std::path::{Path, PathBuf};

use factorgen_core::Difficulty;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransportTarget {
    /// OpenAI-compatible chat-completions endpoint accepting inline images.
    Http { url: String, model: String, api_key_env: Option<String> },
    /// Canned responses from a file.
    Replay { path: PathBuf },
    /// A uniformly random responder over each query's admissible answers.
    Random { seed: u64 },
    /// Answers every query with its gold label.
    Gold,
}

fn default_retries() -> u32 {
    3
}

fn default_timeout() -> u64 {
    120
}

fn default_concurrency() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub name: String,
    pub transport: TransportTarget,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub top_p: Option<f64>,
    /// Free-form reasoning-budget tag passed through to the provider.
    #[serde(default)]
    pub reasoning: Option<String>,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
}

impl EndpointConfig {
    pub fn new(name: impl Into<String>, transport: TransportTarget) -> Self {
        EndpointConfig {
            name: name.into(),
            transport,
            temperature: 0.0,
            top_p: None,
            reasoning: None,
            max_retries: default_retries(),
            timeout_secs: default_timeout(),
            concurrency: default_concurrency(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.concurrency == 0 {
            return Err(HarnessError::Config(format!("endpoint `{}` has zero concurrency", self.name)));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(HarnessError::Config(format!("endpoint `{}` temperature out of range", self.name)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    #[serde(default)]
    pub difficulty: Difficulty,
    #[serde(default)]
    pub master_seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { difficulty: Difficulty::Normal, master_seed: 0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Config {
    #[serde(default)]
    pub corpus: CorpusConfig,
    #[serde(default)]
    pub endpoint: Vec<EndpointConfig>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        for e in &cfg.endpoint {
            e.validate()?;
        }
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
        Self::from_toml(&text)
    }

    pub fn endpoint(&self, name: &str) -> Result<&EndpointConfig> {
        self.endpoint
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| HarnessError::Config(format!("no endpoint named `{name}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_applied() {
        let cfg = Config::from_toml(
            r#"
            [[endpoint]]
            name = "replay"
            transport = { kind = "replay", path = "canned.jsonl" }
            "#,
        )
        .unwrap();
        let e = cfg.endpoint("replay").unwrap();
        assert_eq!(e.temperature, 0.0);
        assert_eq!(e.max_retries, 3);
        assert_eq!(e.timeout_secs, 120);
        assert_eq!(e.concurrency, 4);
        assert_eq!(cfg.corpus.difficulty, Difficulty::Normal);
        assert!(cfg.endpoint("other").is_err());
    }

    #[test]
    fn bad_values_rejected() {
        let text = r#"
            [[endpoint]]
            name = "x"
            concurrency = 0
            transport = { kind = "gold" }
        "#;
        assert!(Config::from_toml(text).is_err());
        assert!(Config::from_toml("[[endpoint]]\nname = 3").is_err());
    }
}
