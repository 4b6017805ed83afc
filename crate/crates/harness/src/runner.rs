//! Runs every manifest query against an endpoint, with retries, bounded
//! concurrency and an append-only transcript that survives interruption.

use std::collections::{HashMap, HashSet};
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use factorgen_core::scoring::normalize_answer;

use crate::config::EndpointConfig;
use crate::error::{HarnessError, Result};
use crate::manifest::{ItemRecord, Manifest, QueryRecord};
use crate::prompts::assemble_prompt;
use crate::transcript::{Transcript, TranscriptHeader, TranscriptRow};
use crate::transport::{Request, Transport};

/// Asks one query, retrying transport failures and unparseable replies.
///
/// Latency sums the replies received; failed transport calls add none.
pub fn ask(item: &ItemRecord, query: &QueryRecord, corpus_dir: &Path, endpoint: &EndpointConfig, transport: &dyn Transport) -> Result<TranscriptRow> {
    let message = assemble_prompt(item, query, corpus_dir)?;
    let req = Request { query_id: &query.query_id, message: &message, endpoint };
    let mut row = TranscriptRow {
        query_id: query.query_id.clone(),
        item_id: item.item_id.clone(),
        subtest: item.subtest,
        participant: None,
        prompt: message.text.clone(),
        raw_response: None,
        normalized: None,
        latency_ms: 0,
        attempts: 0,
        failure: None,
        submitted_at_ms: None,
    };
    for _ in 0..=endpoint.max_retries {
        row.attempts += 1;
        let started = Instant::now();
        match transport.complete(&req) {
            Ok(reply) => {
                row.latency_ms += reply.latency_ms.unwrap_or_else(|| started.elapsed().as_millis() as u64);
                row.normalized = normalize_answer(&reply.text, query.answer);
                row.raw_response = Some(reply.text);
                if row.normalized.is_some() {
                    row.failure = None;
                    return Ok(row);
                }
                row.failure = Some("unparseable response".into());
            }
            Err(e) => row.failure = Some(format!("transport: {e}")),
        }
    }
    Ok(row)
}

fn load_existing(out: &Path, header: &TranscriptHeader, manifest: &Manifest) -> Result<Vec<TranscriptRow>> {
    let text = std::fs::read_to_string(out).map_err(HarnessError::io(out))?;
    let t = Transcript::from_text(&text, true)?;
    if t.header != *header {
        return Err(HarnessError::Config(format!(
            "{} belongs to endpoint `{}` on manifest {}, not `{}` on {}",
            out.display(),
            t.header.source,
            t.header.manifest,
            header.source,
            header.manifest
        )));
    }
    let known: HashSet<&str> = manifest.queries().map(|(_, q)| q.query_id.as_str()).collect();
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for r in t.rows {
        if !known.contains(r.query_id.as_str()) {
            return Err(HarnessError::Config(format!("transcript row {} is not in the manifest", r.query_id)));
        }
        if seen.insert(r.query_id.clone()) {
            rows.push(r);
        }
    }
    Transcript { header: header.clone(), rows: rows.clone() }.write(out)?;
    Ok(rows)
}

/// Runs the suite, resuming from `out` if it already holds rows for the same
/// endpoint and manifest. The finished transcript is rewritten in manifest order.
pub fn run_suite(manifest: &Manifest, corpus_dir: &Path, endpoint: &EndpointConfig, transport: &dyn Transport, out: &Path) -> Result<Transcript> {
    endpoint.validate()?;
    let header = TranscriptHeader::new(&endpoint.name, manifest.digest());
    let existing = if out.exists() {
        load_existing(out, &header, manifest)?
    } else {
        std::fs::write(out, Transcript::header_line(&header)).map_err(HarnessError::io(out))?;
        Vec::new()
    };
    let done: HashSet<String> = existing.iter().map(|r| r.query_id.clone()).collect();
    let pending: Vec<(&ItemRecord, &QueryRecord)> = manifest.queries().filter(|(_, q)| !done.contains(&q.query_id)).collect();

    let file = OpenOptions::new().append(true).open(out).map_err(HarnessError::io(out))?;
    let writer = Mutex::new(file);
    let next = AtomicUsize::new(0);
    let first_error: Mutex<Option<HarnessError>> = Mutex::new(None);
    let workers = endpoint.concurrency.min(pending.len()).max(1);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                if first_error.lock().expect("error lock").is_some() {
                    return;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some((item, query)) = pending.get(i) else { return };
                let outcome = ask(item, query, corpus_dir, endpoint, transport).and_then(|row| {
                    let mut f = writer.lock().expect("writer lock");
                    f.write_all(row.to_line().as_bytes()).and_then(|_| f.flush()).map_err(HarnessError::io(out))
                });
                if let Err(e) = outcome {
                    first_error.lock().expect("error lock").get_or_insert(e);
                    return;
                }
            });
        }
    });
    if let Some(e) = first_error.into_inner().expect("error lock") {
        return Err(e);
    }
    drop(writer);

    let all = Transcript::read(out)?;
    let mut by_id: HashMap<String, TranscriptRow> = HashMap::new();
    for r in all.rows {
        by_id.entry(r.query_id.clone()).or_insert(r);
    }
    let rows = manifest
        .queries()
        .map(|(_, q)| {
            by_id
                .remove(&q.query_id)
                .ok_or_else(|| HarnessError::Config(format!("query {} missing from transcript", q.query_id)))
        })
        .collect::<Result<Vec<_>>>()?;
    let transcript = Transcript { header, rows };
    transcript.write(out)?;
    Ok(transcript)
}
