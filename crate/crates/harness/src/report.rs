//! Scoring transcripts against a manifest and rendering result tables.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use factorgen_core::scoring::{aggregate, is_correct, normalize_answer, ScoreTable, ScoredGroup, Subtest};
use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::manifest::{Manifest, QueryRecord};
use crate::transcript::{Transcript, TranscriptRow};

/// How several answers to one query (human studies) are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// A query counts as correct when most of its answers are correct.
    Majority,
    /// Each answer set is scored separately and the group credits averaged.
    Mean,
}

impl std::str::FromStr for Reduction {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "majority" => Ok(Reduction::Majority),
            "mean" => Ok(Reduction::Mean),
            other => Err(HarnessError::Config(format!("unknown reduction `{other}`"))),
        }
    }
}

/// Whether one recorded response is correct. The raw text is re-normalized,
/// so human logs and model transcripts are judged identically.
pub fn row_correct(row: &TranscriptRow, query: &QueryRecord) -> bool {
    let answer = row.raw_response.as_deref().and_then(|raw| normalize_answer(raw, query.answer));
    is_correct(answer.as_ref(), &query.gold)
}

/// Per-group credits for a transcript. Without `partial`, every manifest
/// query must have at least one row.
pub fn scored_groups(manifest: &Manifest, rows: &[TranscriptRow], reduction: Reduction, partial: bool) -> Result<Vec<ScoredGroup>> {
    let by_query: HashMap<&str, Vec<&TranscriptRow>> = rows.iter().into_group_map_by(|r| r.query_id.as_str());
    for id in by_query.keys() {
        if manifest.query(id).is_none() {
            return Err(HarnessError::Config(format!("transcript row {id} is not in the manifest")));
        }
    }
    let mut out = Vec::new();
    for item in &manifest.items {
        let answers: Vec<(&QueryRecord, &[&TranscriptRow])> = item
            .queries
            .iter()
            .map(|q| (q, by_query.get(q.query_id.as_str()).map(Vec::as_slice).unwrap_or(&[])))
            .collect();
        if let Some((q, _)) = answers.iter().find(|(_, rs)| rs.is_empty()) {
            if !partial {
                return Err(HarnessError::Config(format!("query {} has no answer (use the partial-run flag)", q.query_id)));
            }
            if answers.iter().all(|(_, rs)| rs.is_empty()) {
                continue;
            }
        }
        let subtest = item.subtest;
        match reduction {
            Reduction::Majority => {
                let credit = answers.iter().all(|(q, rs)| {
                    let right = rs.iter().filter(|r| row_correct(r, q)).count();
                    2 * right > rs.len()
                });
                out.push(ScoredGroup { subtest, credit });
            }
            Reduction::Mean => {
                let replicas = answers.iter().map(|(_, rs)| rs.len()).min().unwrap_or(0).max(1);
                for k in 0..replicas {
                    let credit = answers.iter().all(|(q, rs)| rs.get(k).is_some_and(|r| row_correct(r, q)));
                    out.push(ScoredGroup { subtest, credit });
                }
            }
        }
    }
    Ok(out)
}

/// Scores a transcript over the subtests present in the manifest.
pub fn score(manifest: &Manifest, transcript: &Transcript, reduction: Reduction, partial: bool) -> Result<ScoreTable> {
    if transcript.header.manifest != manifest.digest() {
        return Err(HarnessError::Config(format!(
            "transcript was recorded against manifest {}, not {}",
            transcript.header.manifest,
            manifest.digest()
        )));
    }
    let groups = scored_groups(manifest, &transcript.rows, reduction, partial)?;
    Ok(aggregate(&groups, true)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub model: String,
    pub subtests: BTreeMap<Subtest, f64>,
    pub total: f64,
}

impl ResultRow {
    pub fn from_table(model: impl Into<String>, t: &ScoreTable) -> Self {
        ResultRow {
            model: model.into(),
            subtests: t.subtests.iter().map(|(s, v)| (*s, v.accuracy)).collect(),
            total: t.total,
        }
    }
}

/// Machine-readable results: one row per transcript, plus the best-of row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Results {
    pub schema: String,
    pub version: u32,
    pub rows: Vec<ResultRow>,
    pub best: Option<ResultRow>,
}

impl Results {
    pub fn new(named: &[(String, ScoreTable)]) -> Self {
        let rows = named.iter().map(|(n, t)| ResultRow::from_table(n, t)).collect();
        let tables: Vec<ScoreTable> = named.iter().map(|(_, t)| t.clone()).collect();
        let best = if named.len() > 1 { ScoreTable::best_of(&tables).map(|t| ResultRow::from_table("best", &t)) } else { None };
        Results { schema: "factorgen.results".into(), version: 1, rows, best }
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("results serialize");
        s.push('\n');
        s
    }

    /// A fixed-width table with one column per subtest and a total column.
    pub fn render(&self) -> String {
        let cols: Vec<Subtest> = self.rows.iter().flat_map(|r| r.subtests.keys().copied()).sorted().dedup().collect();
        let name_w = self.rows.iter().map(|r| r.model.len()).chain([5]).max().unwrap_or(5);
        let mut out = String::new();
        let _ = write!(out, "{:<name_w$}", "model");
        for c in &cols {
            let _ = write!(out, " {:>6}", c.code());
        }
        let _ = writeln!(out, " {:>6}", "total");
        for r in self.rows.iter().chain(&self.best) {
            let _ = write!(out, "{:<name_w$}", r.model);
            for c in &cols {
                match r.subtests.get(c) {
                    Some(v) => {
                        let _ = write!(out, " {v:>6.2}");
                    }
                    None => {
                        let _ = write!(out, " {:>6}", "-");
                    }
                }
            }
            let _ = writeln!(out, " {:>6.2}", r.total);
        }
        out
    }
}

/// Closed-form expectation and standard error of a random responder's total on this manifest.
pub fn random_total_expectation(manifest: &Manifest) -> (f64, f64) {
    let counts = manifest.counts();
    let k = counts.len() as f64;
    let mut mean = 0.0;
    let mut var = 0.0;
    for (s, (items, _)) in counts {
        let p = s.chance();
        mean += 100.0 * p / k;
        var += (100.0 / k).powi(2) * p * (1.0 - p) / items as f64;
    }
    (mean, var.sqrt())
}
