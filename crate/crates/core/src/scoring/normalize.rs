use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// How a raw response is parsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnswerKind {
    YesNo,
    Letter { options: u8 },
    Number,
    Pair,
    Text,
}

/// A canonical answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Answer {
    Bool(bool),
    Letter(char),
    Number(f64),
    Pair(i64, i64),
    Text(String),
}

impl fmt::Display for Answer {
    /// Canonical text; normalizing it again yields the same answer.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Bool(b) => write!(f, "{b}"),
            Answer::Letter(c) => write!(f, "{c}"),
            Answer::Number(x) => write!(f, "{x}"),
            Answer::Pair(a, b) => write!(f, "({a}, {b})"),
            Answer::Text(t) => f.write_str(t),
        }
    }
}

/// The gold label of one query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum GroundTruth {
    Bool(bool),
    Letter(char),
    Number(i64),
    Pair(i64, i64),
    /// Any listed alias is accepted.
    Aliases(Vec<String>),
    /// Only this exact string is accepted.
    Exact(String),
}

impl GroundTruth {
    pub fn kind(&self, letter_options: u8) -> AnswerKind {
        match self {
            GroundTruth::Bool(_) => AnswerKind::YesNo,
            GroundTruth::Letter(_) => AnswerKind::Letter { options: letter_options },
            GroundTruth::Number(_) => AnswerKind::Number,
            GroundTruth::Pair(..) => AnswerKind::Pair,
            GroundTruth::Aliases(_) | GroundTruth::Exact(_) => AnswerKind::Text,
        }
    }
}

fn envelope_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"(?is)\{\s*["']?answer["']?\s*:\s*(.*?)\s*\}"#).expect("valid regex"))
}

fn letter_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(?:option\s+)?\(?([a-z])\)?[.):!,;]*$").expect("valid regex"))
}

fn pair_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[(\[]?\s*(-?\d+)\s*,\s*(-?\d+)\s*[)\]]?$").expect("valid regex"))
}

fn value_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items.iter().map(value_text).collect();
            parts.map(|p| format!("({})", p.join(", ")))
        }
        Value::Null | Value::Object(_) => None,
    }
}

/// Pulls the payload out of an `{"answer": ...}` envelope, falling back to the whole text.
fn unwrap_envelope(raw: &str) -> String {
    // Prefer a well-formed JSON object; the last one wins when a model restates its answer.
    let mut found = None;
    for (i, _) in raw.match_indices('{') {
        let mut stream = serde_json::Deserializer::from_str(&raw[i..]).into_iter::<Value>();
        if let Some(Ok(Value::Object(map))) = stream.next() {
            if let Some(text) = map.get("answer").and_then(value_text) {
                found = Some(text);
            }
        }
    }
    if let Some(text) = found {
        return text;
    }
    if let Some(c) = envelope_re().captures_iter(raw).last() {
        return c[1].to_string();
    }
    raw.to_string()
}

fn clean(text: &str) -> String {
    let mut t = text.to_lowercase();
    loop {
        let next = t
            .trim_matches(|c: char| c == '"' || c == '\'' || c == '`' || c.is_whitespace())
            .trim_end_matches(['.', '!', ';', ':', ','])
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ");
        if next == t {
            return t;
        }
        t = next;
    }
}

/// Normalizes a raw response into a canonical answer; `None` is unparseable.
pub fn normalize_answer(raw: &str, kind: AnswerKind) -> Option<Answer> {
    let text = clean(&unwrap_envelope(raw));
    match kind {
        AnswerKind::YesNo => match text.as_str() {
            "t" | "y" | "1" | "true" | "yes" => Some(Answer::Bool(true)),
            "f" | "n" | "0" | "false" | "no" => Some(Answer::Bool(false)),
            _ => None,
        },
        AnswerKind::Letter { options } => {
            let c = letter_re().captures(&text)?[1].chars().next()?;
            ((c as u32) < u32::from(b'a') + u32::from(options)).then_some(Answer::Letter(c))
        }
        AnswerKind::Number => {
            let x: f64 = text.parse().ok()?;
            x.is_finite().then_some(Answer::Number(if x == 0.0 { 0.0 } else { x }))
        }
        AnswerKind::Pair => {
            let c = pair_re().captures(&text)?;
            Some(Answer::Pair(c[1].parse().ok()?, c[2].parse().ok()?))
        }
        AnswerKind::Text => (!text.is_empty()).then_some(Answer::Text(text)),
    }
}

/// Whether a normalized answer matches the gold label. Unparseable answers are wrong.
pub fn is_correct(answer: Option<&Answer>, gold: &GroundTruth) -> bool {
    let Some(answer) = answer else {
        return false;
    };
    match (answer, gold) {
        (Answer::Bool(a), GroundTruth::Bool(g)) => a == g,
        (Answer::Letter(a), GroundTruth::Letter(g)) => *a == g.to_ascii_lowercase(),
        (Answer::Number(a), GroundTruth::Number(g)) => *a == *g as f64,
        (Answer::Pair(a, b), GroundTruth::Pair(x, y)) => (a, b) == (x, y),
        (Answer::Text(a), GroundTruth::Aliases(list)) => list.iter().any(|g| clean(g) == *a),
        (Answer::Text(a), GroundTruth::Exact(g)) => clean(g) == *a,
        _ => false,
    }
}
