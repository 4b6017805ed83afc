//! HTTP interface for human studies: participants fetch their assignment and
//! items, submit answers, and the study owner exports the log as a transcript.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::OpenOptions;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Path as UrlPath, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use factorgen_core::scoring::{normalize_answer, AnswerKind, Subtest};
use factorgen_core::SeededRng;
use rand::seq::SliceRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{HarnessError, Result};
use crate::manifest::Manifest;
use crate::prompts::fill;
use crate::transcript::{Transcript, TranscriptHeader, TranscriptRow};

pub const HUMAN_SOURCE: &str = "human";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Participant {
    pub token: String,
    pub queries: Vec<String>,
}

/// Which participant sees which query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentPlan {
    pub manifest: String,
    pub participants: Vec<Participant>,
}

impl AssignmentPlan {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
        serde_json::from_str(&text).map_err(HarnessError::parse("assignment plan"))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("plan serializes") + "\n";
        std::fs::write(path, text).map_err(HarnessError::io(path))
    }
}

/// Deals every query to `per_query` distinct participants. Queries are
/// shuffled, then handed out cyclically so loads differ by at most one.
pub fn plan_assignments(manifest: &Manifest, participants: usize, per_query: usize, rng: &mut SeededRng) -> Result<AssignmentPlan> {
    if per_query == 0 || participants < per_query {
        return Err(HarnessError::Config(format!(
            "{per_query} answers per query need at least that many participants, got {participants}"
        )));
    }
    let mut ids: Vec<String> = manifest.queries().map(|(_, q)| q.query_id.clone()).collect();
    ids.shuffle(rng);
    let mut people: Vec<Participant> = (0..participants)
        .map(|_| Participant { token: format!("{:016x}", rng.next_u64()), queries: Vec::new() })
        .collect();
    let mut slot = 0usize;
    for id in ids {
        for _ in 0..per_query {
            people[slot % participants].queries.push(id.clone());
            slot += 1;
        }
    }
    Ok(AssignmentPlan { manifest: manifest.digest(), participants: people })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StudyError {
    #[error("unknown participant")]
    UnknownParticipant,
    #[error("query {0} is not assigned to this participant")]
    NotAssigned(String),
    #[error("query {0} was already answered")]
    AlreadyAnswered(String),
    #[error("not found")]
    NotFound,
    #[error("{0}")]
    Storage(String),
}

impl StudyError {
    fn status(&self) -> StatusCode {
        match self {
            StudyError::UnknownParticipant | StudyError::NotAssigned(_) => StatusCode::FORBIDDEN,
            StudyError::AlreadyAnswered(_) => StatusCode::CONFLICT,
            StudyError::NotFound => StatusCode::NOT_FOUND,
            StudyError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for StudyError {
    fn into_response(self) -> Response {
        (self.status(), Json(serde_json::json!({ "error": self.to_string() }))).into_response()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentEntry {
    pub query_id: String,
    pub answered: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentView {
    pub participant: String,
    pub queries: Vec<AssignmentEntry>,
    pub remaining: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemView {
    pub query_id: String,
    pub item_id: String,
    pub subtest: Subtest,
    pub prompt: String,
    /// URLs under `/images/`, in prompt order.
    pub images: Vec<String>,
    pub answer: AnswerKind,
    pub choices: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submission {
    pub participant: String,
    pub query_id: String,
    pub answer: String,
    /// Time on the item as measured by the client.
    #[serde(default)]
    pub latency_ms: Option<u64>,
}

/// Study state: the corpus, the plan, and an append-only answer log.
pub struct Study {
    manifest: Manifest,
    corpus_dir: PathBuf,
    assigned: HashMap<String, Vec<String>>,
    image_paths: HashSet<String>,
    log_path: PathBuf,
    header: TranscriptHeader,
    answers: Mutex<BTreeMap<(String, String), TranscriptRow>>,
}

impl Study {
    /// Opens a study, replaying any answers already in `log_path`.
    pub fn open(manifest: Manifest, corpus_dir: PathBuf, plan: AssignmentPlan, log_path: PathBuf) -> Result<Self> {
        let header = TranscriptHeader::new(HUMAN_SOURCE, manifest.digest());
        if plan.manifest != header.manifest {
            return Err(HarnessError::Config("assignment plan was made for a different manifest".into()));
        }
        for p in &plan.participants {
            if let Some(id) = p.queries.iter().find(|id| manifest.query(id).is_none()) {
                return Err(HarnessError::Config(format!("assigned query {id} is not in the manifest")));
            }
        }
        let mut answers = BTreeMap::new();
        if log_path.exists() {
            let text = std::fs::read_to_string(&log_path).map_err(HarnessError::io(&log_path))?;
            let t = Transcript::from_text(&text, true)?;
            if t.header != header {
                return Err(HarnessError::Config(format!("{} belongs to another study", log_path.display())));
            }
            for r in t.rows {
                let who = r.participant.clone().unwrap_or_default();
                answers.entry((who, r.query_id.clone())).or_insert(r);
            }
            Transcript { header: header.clone(), rows: answers.values().cloned().collect() }.write(&log_path)?;
        } else {
            std::fs::write(&log_path, Transcript::header_line(&header)).map_err(HarnessError::io(&log_path))?;
        }
        let image_paths = manifest.items.iter().flat_map(|i| i.images.iter().map(|r| r.path.clone())).collect();
        Ok(Study {
            assigned: plan.participants.into_iter().map(|p| (p.token, p.queries)).collect(),
            manifest,
            corpus_dir,
            image_paths,
            log_path,
            header,
            answers: Mutex::new(answers),
        })
    }

    fn queries_of(&self, participant: &str) -> std::result::Result<&Vec<String>, StudyError> {
        self.assigned.get(participant).ok_or(StudyError::UnknownParticipant)
    }

    fn check_assigned(&self, participant: &str, query_id: &str) -> std::result::Result<(), StudyError> {
        if self.queries_of(participant)?.iter().any(|q| q == query_id) {
            Ok(())
        } else {
            Err(StudyError::NotAssigned(query_id.to_string()))
        }
    }

    pub fn assignment(&self, participant: &str) -> std::result::Result<AssignmentView, StudyError> {
        let ids = self.queries_of(participant)?;
        let answers = self.answers.lock().expect("answers lock");
        let queries: Vec<AssignmentEntry> = ids
            .iter()
            .map(|id| AssignmentEntry {
                query_id: id.clone(),
                answered: answers.contains_key(&(participant.to_string(), id.clone())),
            })
            .collect();
        let remaining = queries.iter().filter(|q| !q.answered).count();
        Ok(AssignmentView { participant: participant.to_string(), queries, remaining })
    }

    pub fn item(&self, participant: &str, query_id: &str) -> std::result::Result<ItemView, StudyError> {
        self.check_assigned(participant, query_id)?;
        let (item, query) = self.manifest.query(query_id).ok_or(StudyError::NotFound)?;
        let prompt = fill(&query.template, &query.slots).map_err(|e| StudyError::Storage(e.to_string()))?;
        let images = query
            .images
            .iter()
            .map(|role| item.image_path(role).map(|p| format!("/images/{p}")).ok_or(StudyError::NotFound))
            .collect::<std::result::Result<_, _>>()?;
        Ok(ItemView {
            query_id: query.query_id.clone(),
            item_id: item.item_id.clone(),
            subtest: item.subtest,
            prompt,
            images,
            answer: query.answer,
            choices: query.choices.clone(),
        })
    }

    /// Records an answer; each participant answers each assigned query once.
    pub fn submit(&self, s: &Submission) -> std::result::Result<TranscriptRow, StudyError> {
        self.check_assigned(&s.participant, &s.query_id)?;
        let (item, query) = self.manifest.query(&s.query_id).ok_or(StudyError::NotFound)?;
        let key = (s.participant.clone(), s.query_id.clone());
        let mut answers = self.answers.lock().expect("answers lock");
        if answers.contains_key(&key) {
            return Err(StudyError::AlreadyAnswered(s.query_id.clone()));
        }
        let normalized = normalize_answer(&s.answer, query.answer);
        let row = TranscriptRow {
            query_id: query.query_id.clone(),
            item_id: item.item_id.clone(),
            subtest: item.subtest,
            participant: Some(s.participant.clone()),
            prompt: fill(&query.template, &query.slots).map_err(|e| StudyError::Storage(e.to_string()))?,
            raw_response: Some(s.answer.clone()),
            failure: normalized.is_none().then(|| "unparseable response".to_string()),
            normalized,
            latency_ms: s.latency_ms.unwrap_or(0),
            attempts: 1,
            submitted_at_ms: Some(SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)),
        };
        let mut f = OpenOptions::new().append(true).open(&self.log_path).map_err(|e| StudyError::Storage(e.to_string()))?;
        f.write_all(row.to_line().as_bytes())
            .and_then(|_| f.flush())
            .map_err(|e| StudyError::Storage(e.to_string()))?;
        answers.insert(key, row.clone());
        Ok(row)
    }

    /// All answers as a transcript in manifest order, then by participant.
    pub fn export(&self) -> Transcript {
        let order: HashMap<&str, usize> = self.manifest.queries().enumerate().map(|(i, (_, q))| (q.query_id.as_str(), i)).collect();
        let mut rows: Vec<TranscriptRow> = self.answers.lock().expect("answers lock").values().cloned().collect();
        rows.sort_by(|a, b| {
            order[a.query_id.as_str()]
                .cmp(&order[b.query_id.as_str()])
                .then_with(|| a.participant.cmp(&b.participant))
        });
        Transcript { header: self.header.clone(), rows }
    }

    pub fn image(&self, path: &str) -> std::result::Result<Vec<u8>, StudyError> {
        if !self.image_paths.contains(path) {
            return Err(StudyError::NotFound);
        }
        std::fs::read(self.corpus_dir.join(path)).map_err(|_| StudyError::NotFound)
    }
}

type Shared = Arc<Study>;

async fn get_assignment(State(s): State<Shared>, UrlPath(participant): UrlPath<String>) -> std::result::Result<Json<AssignmentView>, StudyError> {
    s.assignment(&participant).map(Json)
}

async fn get_item(State(s): State<Shared>, UrlPath((participant, query_id)): UrlPath<(String, String)>) -> std::result::Result<Json<ItemView>, StudyError> {
    s.item(&participant, &query_id).map(Json)
}

async fn get_image(State(s): State<Shared>, UrlPath(path): UrlPath<String>) -> std::result::Result<Response, StudyError> {
    let bytes = s.image(&path)?;
    Ok(([(header::CONTENT_TYPE, "image/png")], bytes).into_response())
}

async fn post_answer(State(s): State<Shared>, Json(sub): Json<Submission>) -> std::result::Result<Json<TranscriptRow>, StudyError> {
    s.submit(&sub).map(Json)
}

async fn get_log(State(s): State<Shared>) -> Response {
    ([(header::CONTENT_TYPE, "application/x-ndjson")], s.export().to_text()).into_response()
}

pub fn router(study: Shared) -> Router {
    Router::new()
        .route("/api/assignment/{participant}", get(get_assignment))
        .route("/api/item/{participant}/{query_id}", get(get_item))
        .route("/api/answer", post(post_answer))
        .route("/api/log", get(get_log))
        .route("/images/{*path}", get(get_image))
        .with_state(study)
}

/// Serves until the process is stopped.
pub async fn serve(study: Study, addr: SocketAddr) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(Arc::new(study))).await?;
    Ok(())
}
