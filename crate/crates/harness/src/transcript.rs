//! Transcripts: one header line, then one JSON row per answered query.
//!
//! Model runs and human study logs share this format; a human log simply
//! carries a participant token and a timestamp on each row.

use std::io::Write;
use std::path::Path;

use factorgen_core::scoring::{Answer, Subtest};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const TRANSCRIPT_SCHEMA: &str = "factorgen.transcript";
pub const TRANSCRIPT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptHeader {
    pub schema: String,
    pub version: u32,
    /// Endpoint name, or `human` for study logs.
    pub source: String,
    /// Digest of the manifest the queries came from.
    pub manifest: String,
}

impl TranscriptHeader {
    pub fn new(source: impl Into<String>, manifest_digest: impl Into<String>) -> Self {
        TranscriptHeader {
            schema: TRANSCRIPT_SCHEMA.to_string(),
            version: TRANSCRIPT_VERSION,
            source: source.into(),
            manifest: manifest_digest.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRow {
    pub query_id: String,
    pub item_id: String,
    pub subtest: Subtest,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub participant: Option<String>,
    pub prompt: String,
    pub raw_response: Option<String>,
    pub normalized: Option<Answer>,
    pub latency_ms: u64,
    pub attempts: u32,
    pub failure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submitted_at_ms: Option<u64>,
}

impl TranscriptRow {
    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("row serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub header: TranscriptHeader,
    pub rows: Vec<TranscriptRow>,
}

impl Transcript {
    pub fn header_line(header: &TranscriptHeader) -> String {
        let mut s = serde_json::to_string(header).expect("header serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = Self::header_line(&self.header);
        for r in &self.rows {
            s.push_str(&r.to_line());
        }
        s
    }

    /// Parses a transcript. With `lenient`, a truncated final line (an
    /// interrupted append) is dropped instead of rejected.
    pub fn from_text(text: &str, lenient: bool) -> Result<Self> {
        let mut lines = text.split_inclusive('\n').peekable();
        let first = lines.next().ok_or_else(|| HarnessError::Config("empty transcript".into()))?;
        let header: TranscriptHeader = serde_json::from_str(first).map_err(HarnessError::parse("transcript header"))?;
        if header.schema != TRANSCRIPT_SCHEMA || header.version != TRANSCRIPT_VERSION {
            return Err(HarnessError::Config(format!("unsupported transcript schema {} v{}", header.schema, header.version)));
        }
        let mut rows = Vec::new();
        while let Some(line) = lines.next() {
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<TranscriptRow>(line) {
                Ok(r) => rows.push(r),
                Err(_) if lenient && lines.peek().is_none() && !line.ends_with('\n') => break,
                Err(e) => return Err(HarnessError::Parse { what: "transcript row".into(), source: e }),
            }
        }
        Ok(Transcript { header, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
        Self::from_text(&text, false)
    }

    /// Writes through a temporary file so readers never observe a half-written transcript.
    pub fn write(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut f = std::fs::File::create(&tmp).map_err(HarnessError::io(&tmp))?;
            f.write_all(self.to_text().as_bytes()).map_err(HarnessError::io(&tmp))?;
            f.sync_all().map_err(HarnessError::io(&tmp))?;
        }
        std::fs::rename(&tmp, path).map_err(HarnessError::io(path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str) -> TranscriptRow {
        TranscriptRow {
            query_id: id.into(),
            item_id: "S2-0000".into(),
            subtest: Subtest::S2,
            participant: None,
            prompt: "p".into(),
            raw_response: Some(r#"{"answer": "TRUE"}"#.into()),
            normalized: Some(Answer::Bool(true)),
            latency_ms: 5,
            attempts: 1,
            failure: None,
            submitted_at_ms: None,
        }
    }

    #[test]
    fn round_trip() {
        let t = Transcript { header: TranscriptHeader::new("replay", "abc"), rows: vec![row("a"), row("b")] };
        let text = t.to_text();
        let back = Transcript::from_text(&text, false).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_text(), text);
        assert!(!text.contains("participant"));
    }

    #[test]
    fn truncated_tail_only_in_lenient_mode() {
        let t = Transcript { header: TranscriptHeader::new("replay", "abc"), rows: vec![row("a")] };
        let mut text = t.to_text();
        text.push_str(r#"{"query_id": "b", "item"#);
        assert!(Transcript::from_text(&text, false).is_err());
        assert_eq!(Transcript::from_text(&text, true).unwrap().rows.len(), 1);
    }
}
