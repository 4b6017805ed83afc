use std::collections::BTreeMap;
use std::sync::Arc;

use factorgen_core::scoring::{GroundTruth, Subtest};
use factorgen_core::{Difficulty, SeededRng};
use factorgen_harness::corpus::build_corpus;
use factorgen_harness::manifest::{Manifest, Plan};
use factorgen_harness::report::{score, Reduction};
use factorgen_harness::serve::{plan_assignments, router, AssignmentView, ItemView, Study, StudyError, Submission};
use factorgen_harness::transcript::Transcript;
use factorgen_harness::transport::gold_text;

fn fixture() -> (tempfile::TempDir, Manifest) {
    let dir = tempfile::tempdir().unwrap();
    let mut plan = Plan::empty(Difficulty::Normal);
    for s in [Subtest::S2, Subtest::Cf3, Subtest::Ma1, Subtest::Ss3] {
        plan.counts.insert(s, 5);
    }
    let m = build_corpus(&plan, 31, dir.path()).unwrap();
    (dir, m)
}

fn open(dir: &tempfile::TempDir, m: &Manifest, participants: usize) -> (Study, Vec<String>) {
    let plan = plan_assignments(m, participants, 3, &mut SeededRng::new(4)).unwrap();
    let tokens = plan.participants.iter().map(|p| p.token.clone()).collect();
    let study = Study::open(m.clone(), dir.path().to_path_buf(), plan, dir.path().join("study.jsonl")).unwrap();
    (study, tokens)
}

#[test]
fn plan_covers_every_query_three_times_with_distinct_people() {
    let (_dir, m) = fixture();
    let plan = plan_assignments(&m, 7, 3, &mut SeededRng::new(1)).unwrap();
    let mut seen: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for p in &plan.participants {
        for q in &p.queries {
            seen.entry(q).or_default().push(&p.token);
        }
    }
    assert_eq!(seen.len(), m.queries().count());
    for who in seen.values() {
        assert_eq!(who.len(), 3);
        assert!(who[0] != who[1] && who[1] != who[2] && who[0] != who[2]);
    }
    let loads: Vec<usize> = plan.participants.iter().map(|p| p.queries.len()).collect();
    assert!(loads.iter().max().unwrap() - loads.iter().min().unwrap() <= 1);
    assert!(plan_assignments(&m, 2, 3, &mut SeededRng::new(1)).is_err());
}

#[test]
fn three_participant_study_round_trips_into_the_scorer() {
    let (dir, m) = fixture();
    let (study, tokens) = open(&dir, &m, 3);
    // With three participants each answers every query; the third errs on every S2 statement.
    for (i, token) in tokens.iter().enumerate() {
        let view = study.assignment(token).unwrap();
        assert_eq!(view.remaining, m.queries().count());
        for entry in &view.queries {
            let (item, q) = m.query(&entry.query_id).unwrap();
            let answer = match (&q.gold, i, item.subtest) {
                (GroundTruth::Bool(b), 2, Subtest::S2) => if *b { "FALSE".into() } else { "TRUE".into() },
                (g, _, _) => gold_text(g),
            };
            study.submit(&Submission { participant: token.clone(), query_id: entry.query_id.clone(), answer, latency_ms: Some(900) }).unwrap();
        }
        assert_eq!(study.assignment(token).unwrap().remaining, 0);
    }
    let log = study.export();
    assert_eq!(log.rows.len(), 3 * m.queries().count());
    let text = log.to_text();
    let parsed = Transcript::from_text(&text, false).unwrap();
    let majority = score(&m, &parsed, Reduction::Majority, false).unwrap();
    assert_eq!(majority.total, 100.0);
    let mean = score(&m, &parsed, Reduction::Mean, false).unwrap();
    assert!((mean.subtests[&Subtest::S2].accuracy - 200.0 / 3.0).abs() < 1e-9);
    assert_eq!(mean.subtests[&Subtest::Cf3].accuracy, 100.0);

    drop(study);
    let (reopened, _) = open(&dir, &m, 3);
    assert_eq!(reopened.export().to_text(), text);
}

#[test]
fn duplicate_and_unassigned_answers_are_refused() {
    let (dir, m) = fixture();
    let (study, tokens) = open(&dir, &m, 4);
    let mine = study.assignment(&tokens[0]).unwrap().queries[0].query_id.clone();
    let theirs = m
        .queries()
        .map(|(_, q)| q.query_id.clone())
        .find(|id| !study.assignment(&tokens[0]).unwrap().queries.iter().any(|e| &e.query_id == id))
        .unwrap();
    let sub = |q: &str| Submission { participant: tokens[0].clone(), query_id: q.into(), answer: "3".into(), latency_ms: None };
    let row = study.submit(&sub(&mine)).unwrap();
    assert_eq!(row.participant.as_deref(), Some(tokens[0].as_str()));
    assert_eq!(study.submit(&sub(&mine)), Err(StudyError::AlreadyAnswered(mine.clone())));
    assert_eq!(study.submit(&sub(&theirs)), Err(StudyError::NotAssigned(theirs.clone())));
    assert!(matches!(study.item(&tokens[0], &theirs), Err(StudyError::NotAssigned(_))));
    assert_eq!(study.assignment("nobody").unwrap_err(), StudyError::UnknownParticipant);
    assert_eq!(study.image("manifest.json").unwrap_err(), StudyError::NotFound);
}

#[tokio::test(flavor = "multi_thread")]
async fn http_endpoints() {
    let (dir, m) = fixture();
    let (study, tokens) = open(&dir, &m, 3);
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router(Arc::new(study))).await.unwrap() });
    let base = format!("http://{addr}");
    let client = reqwest::Client::new();

    let view: AssignmentView = client.get(format!("{base}/api/assignment/{}", tokens[1])).send().await.unwrap().json().await.unwrap();
    let first = &view.queries[0].query_id;
    let item: ItemView = client.get(format!("{base}/api/item/{}/{first}", tokens[1])).send().await.unwrap().json().await.unwrap();
    assert!(item.prompt.starts_with(|c: char| c.is_alphabetic()));
    let png = client.get(format!("{base}{}", item.images[0])).send().await.unwrap();
    assert_eq!(png.status(), 200);
    assert!(png.bytes().await.unwrap().starts_with(b"\x89PNG"));
    assert_eq!(client.get(format!("{base}/images/../manifest.json")).send().await.unwrap().status(), 404);

    let (_, q) = m.query(first).unwrap();
    let body = serde_json::json!({ "participant": tokens[1], "query_id": first, "answer": gold_text(&q.gold) });
    let status = |r: reqwest::Response| r.status().as_u16();
    assert_eq!(status(client.post(format!("{base}/api/answer")).json(&body).send().await.unwrap()), 200);
    assert_eq!(status(client.post(format!("{base}/api/answer")).json(&body).send().await.unwrap()), 409);
    let stranger = serde_json::json!({ "participant": "nobody", "query_id": first, "answer": "x" });
    assert_eq!(status(client.post(format!("{base}/api/answer")).json(&stranger).send().await.unwrap()), 403);

    let log = client.get(format!("{base}/api/log")).send().await.unwrap().text().await.unwrap();
    let t = Transcript::from_text(&log, false).unwrap();
    assert_eq!(t.rows.len(), 1);
    assert_eq!(t.rows[0].participant.as_deref(), Some(tokens[1].as_str()));
    assert_eq!(t.header.source, "human");
}
