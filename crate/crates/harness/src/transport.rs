//! The chat-with-images contract and its transports.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

use base64::Engine;
use factorgen_core::rng::derive_seed;
use factorgen_core::scoring::{AnswerKind, GroundTruth};
use factorgen_core::SeededRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{EndpointConfig, TransportTarget};
use crate::error::{HarnessError, Result};
use crate::manifest::Manifest;
use crate::prompts::Message;
use crate::transcript::Transcript;

pub struct Request<'a> {
    pub query_id: &'a str,
    pub message: &'a Message,
    pub endpoint: &'a EndpointConfig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub text: String,
    /// Reported latency; the runner measures wall time when absent.
    pub latency_ms: Option<u64>,
}

impl Reply {
    pub fn text(text: impl Into<String>) -> Self {
        Reply { text: text.into(), latency_ms: None }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TransportError {
    #[error("request timed out")]
    Timeout,
    #[error("{0}")]
    Failed(String),
}

pub trait Transport: Send + Sync {
    fn complete(&self, req: &Request<'_>) -> Result<Reply, TransportError>;
}

/// One canned outcome in a replay file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Canned {
    Text {
        text: String,
        #[serde(default)]
        latency_ms: Option<u64>,
    },
    Error {
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayEntry {
    pub query_id: String,
    pub responses: Vec<Canned>,
}

/// Serves canned responses in order; each call for a query consumes the next one.
pub struct ReplayTransport {
    entries: HashMap<String, Vec<Canned>>,
    cursor: Mutex<HashMap<String, usize>>,
}

impl ReplayTransport {
    pub fn new(entries: Vec<ReplayEntry>) -> Self {
        ReplayTransport {
            entries: entries.into_iter().map(|e| (e.query_id, e.responses)).collect(),
            cursor: Mutex::new(HashMap::new()),
        }
    }

    /// Reads a JSON-lines replay file.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
        let entries = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(HarnessError::parse("replay entry")))
            .collect::<Result<Vec<ReplayEntry>>>()?;
        Ok(Self::new(entries))
    }

    /// Replays the final response of each row of an earlier transcript.
    pub fn from_transcript(t: &Transcript) -> Self {
        let entries = t
            .rows
            .iter()
            .map(|r| ReplayEntry {
                query_id: r.query_id.clone(),
                responses: vec![match &r.raw_response {
                    Some(text) => Canned::Text { text: text.clone(), latency_ms: Some(r.latency_ms) },
                    None => Canned::Error { error: r.failure.clone().unwrap_or_else(|| "no response".into()) },
                }],
            })
            .collect();
        Self::new(entries)
    }
}

impl Transport for ReplayTransport {
    fn complete(&self, req: &Request<'_>) -> Result<Reply, TransportError> {
        let list = self
            .entries
            .get(req.query_id)
            .ok_or_else(|| TransportError::Failed(format!("no canned response for {}", req.query_id)))?;
        let mut cursor = self.cursor.lock().expect("cursor lock");
        let i = cursor.entry(req.query_id.to_string()).or_insert(0);
        // The last canned outcome repeats once the list is exhausted.
        let outcome = list.get(*i).or(list.last()).cloned();
        *i += 1;
        match outcome {
            Some(Canned::Text { text, latency_ms }) => Ok(Reply { text, latency_ms: Some(latency_ms.unwrap_or(0)) }),
            Some(Canned::Error { error }) => Err(TransportError::Failed(error)),
            None => Err(TransportError::Failed(format!("empty canned list for {}", req.query_id))),
        }
    }
}

/// A transport driven by a function of the query id and the call number (0-based).
pub struct ScriptedTransport<F> {
    script: F,
    calls: Mutex<HashMap<String, usize>>,
}

impl<F> ScriptedTransport<F>
where
    F: Fn(&str, usize) -> Result<Reply, TransportError> + Send + Sync,
{
    pub fn new(script: F) -> Self {
        ScriptedTransport { script, calls: Mutex::new(HashMap::new()) }
    }
}

impl<F> Transport for ScriptedTransport<F>
where
    F: Fn(&str, usize) -> Result<Reply, TransportError> + Send + Sync,
{
    fn complete(&self, req: &Request<'_>) -> Result<Reply, TransportError> {
        let n = {
            let mut calls = self.calls.lock().expect("calls lock");
            let c = calls.entry(req.query_id.to_string()).or_insert(0);
            *c += 1;
            *c - 1
        };
        (self.script)(req.query_id, n)
    }
}

fn envelope(value: &str) -> String {
    serde_json::json!({ "answer": value }).to_string()
}

/// The text a perfect responder would give for `gold`.
pub fn gold_text(gold: &GroundTruth) -> String {
    match gold {
        GroundTruth::Bool(true) => "TRUE".into(),
        GroundTruth::Bool(false) => "FALSE".into(),
        GroundTruth::Letter(c) => c.to_string(),
        GroundTruth::Number(n) => n.to_string(),
        GroundTruth::Pair(r, c) => format!("({r}, {c})"),
        GroundTruth::Aliases(list) => list.first().cloned().unwrap_or_default(),
        GroundTruth::Exact(s) => s.clone(),
    }
}

/// Answers from a per-query table built from the manifest.
pub struct TableTransport {
    answers: HashMap<String, Vec<String>>,
    seed: Option<u64>,
}

impl TableTransport {
    /// Always gives the gold label.
    pub fn gold(manifest: &Manifest) -> Self {
        let answers = manifest.queries().map(|(_, q)| (q.query_id.clone(), vec![gold_text(&q.gold)])).collect();
        TableTransport { answers, seed: None }
    }

    /// Picks uniformly among each query's admissible answers; open-vocabulary
    /// queries get a fixed non-answer.
    pub fn random(manifest: &Manifest, seed: u64) -> Self {
        let answers = manifest
            .queries()
            .map(|(_, q)| {
                let choices = match (q.answer, q.choices.is_empty()) {
                    (AnswerKind::Text, _) | (_, true) => vec!["no idea".to_string()],
                    _ => q.choices.clone(),
                };
                (q.query_id.clone(), choices)
            })
            .collect();
        TableTransport { answers, seed: Some(seed) }
    }
}

impl Transport for TableTransport {
    fn complete(&self, req: &Request<'_>) -> Result<Reply, TransportError> {
        let list = self
            .answers
            .get(req.query_id)
            .ok_or_else(|| TransportError::Failed(format!("unknown query {}", req.query_id)))?;
        let pick = match self.seed {
            Some(seed) => {
                let mut rng = SeededRng::new(derive_seed(seed, req.query_id, 0));
                &list[rng.index(list.len())]
            }
            None => &list[0],
        };
        Ok(Reply { text: envelope(pick), latency_ms: Some(0) })
    }
}

/// OpenAI-compatible chat completions with inline PNG images.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
    url: String,
    model: String,
    api_key: Option<String>,
}

impl HttpTransport {
    pub fn new(url: &str, model: &str, api_key_env: Option<&str>, timeout: Duration) -> Result<Self> {
        let api_key = match api_key_env {
            Some(var) => Some(
                std::env::var(var).map_err(|_| HarnessError::Config(format!("environment variable {var} is not set")))?,
            ),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| HarnessError::Config(format!("http client: {e}")))?;
        Ok(HttpTransport { client, url: url.to_string(), model: model.to_string(), api_key })
    }

    fn body(&self, req: &Request<'_>) -> Result<serde_json::Value, TransportError> {
        let mut content = vec![serde_json::json!({ "type": "text", "text": req.message.text })];
        for path in &req.message.images {
            let bytes = std::fs::read(path).map_err(|e| TransportError::Failed(format!("{}: {e}", path.display())))?;
            let data = base64::engine::general_purpose::STANDARD.encode(bytes);
            content.push(serde_json::json!({
                "type": "image_url",
                "image_url": { "url": format!("data:image/png;base64,{data}") }
            }));
        }
        let mut body = serde_json::json!({
            "model": self.model,
            "temperature": req.endpoint.temperature,
            "messages": [{ "role": "user", "content": content }],
        });
        if let Some(p) = req.endpoint.top_p {
            body["top_p"] = p.into();
        }
        if let Some(r) = &req.endpoint.reasoning {
            body["reasoning_effort"] = r.clone().into();
        }
        Ok(body)
    }
}

impl Transport for HttpTransport {
    fn complete(&self, req: &Request<'_>) -> Result<Reply, TransportError> {
        let mut call = self.client.post(&self.url).json(&self.body(req)?);
        if let Some(key) = &self.api_key {
            call = call.bearer_auth(key);
        }
        let resp = call.send().map_err(|e| {
            if e.is_timeout() {
                TransportError::Timeout
            } else {
                TransportError::Failed(e.to_string())
            }
        })?;
        let status = resp.status();
        let value: serde_json::Value = resp.json().map_err(|e| TransportError::Failed(e.to_string()))?;
        if !status.is_success() {
            return Err(TransportError::Failed(format!("HTTP {status}: {value}")));
        }
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(Reply::text)
            .ok_or_else(|| TransportError::Failed(format!("no message content in {value}")))
    }
}

/// Instantiates the transport an endpoint names.
pub fn connect(endpoint: &EndpointConfig, manifest: &Manifest) -> Result<Box<dyn Transport>> {
    Ok(match &endpoint.transport {
        TransportTarget::Http { url, model, api_key_env } => Box::new(HttpTransport::new(
            url,
            model,
            api_key_env.as_deref(),
            Duration::from_secs(endpoint.timeout_secs),
        )?),
        TransportTarget::Replay { path } => Box::new(ReplayTransport::read(path)?),
        TransportTarget::Random { seed } => Box::new(TableTransport::random(manifest, *seed)),
        TransportTarget::Gold => Box::new(TableTransport::gold(manifest)),
    })
}
