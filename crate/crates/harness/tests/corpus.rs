use std::path::Path;

use factorgen_core::scoring::{GroundTruth, Subtest};
use factorgen_core::Difficulty;
use factorgen_harness::corpus::{build_corpus, validate};
use factorgen_harness::manifest::{Manifest, Plan};
use factorgen_harness::prompts::assemble_prompt;

fn small(d: Difficulty) -> Plan {
    Plan::reference(d).capped(3)
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn every_difficulty_builds_and_validates() {
    for d in Difficulty::ALL {
        let dir = tempfile::tempdir().unwrap();
        let m = build_corpus(&small(d), 11, dir.path()).unwrap();
        assert_eq!(m.items.len(), 3 * Subtest::GENERATED.len());
        let report = validate(&m, Some(dir.path()));
        assert!(report.ok(), "{d}: {:?}", report.mismatches);
        assert_eq!(report.images_checked, m.items.iter().map(|i| i.images.len()).sum::<usize>());
        assert_eq!(Manifest::read(dir.path()).unwrap(), m);
    }
}

#[test]
fn regeneration_is_byte_identical_and_seed_sensitive() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let plan = small(Difficulty::Normal);
    let ma = build_corpus(&plan, 3, a.path()).unwrap();
    let mb = build_corpus(&plan, 3, b.path()).unwrap();
    assert_eq!(ma.digest(), mb.digest());
    assert_eq!(files(a.path()), files(b.path()));
    let mc = build_corpus(&plan, 4, c.path()).unwrap();
    assert_ne!(ma.digest(), mc.digest());
}

#[test]
fn tampered_gold_and_images_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut plan = Plan::empty(Difficulty::Normal);
    plan.counts.insert(Subtest::S2, 2);
    plan.counts.insert(Subtest::Cf3, 1);
    let mut m = build_corpus(&plan, 9, dir.path()).unwrap();
    assert!(validate(&m, Some(dir.path())).ok());

    let q = &mut m.items[0].queries[0];
    q.gold = match q.gold {
        GroundTruth::Bool(b) => GroundTruth::Bool(!b),
        GroundTruth::Pair(r, c) => GroundTruth::Pair(r + 1, c),
        ref other => panic!("unexpected gold {other:?}"),
    };
    let report = validate(&m, None);
    assert_eq!(report.mismatches.len(), 1, "{:?}", report.mismatches);
    assert_eq!(report.images_checked, 0);

    let m = Manifest::read(dir.path()).unwrap();
    let img = dir.path().join(&m.items[1].images[0].path);
    let mut bytes = std::fs::read(&img).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0xff;
    std::fs::write(&img, bytes).unwrap();
    let report = validate(&m, Some(dir.path()));
    assert_eq!(report.mismatches.len(), 1, "{:?}", report.mismatches);
    assert!(report.mismatches[0].contains(&m.items[1].images[0].path));
}

#[test]
fn manifest_rejects_foreign_schema() {
    let dir = tempfile::tempdir().unwrap();
    let mut plan = Plan::empty(Difficulty::Easy);
    plan.counts.insert(Subtest::Ma1, 1);
    let m = build_corpus(&plan, 1, dir.path()).unwrap();
    let text = m.to_text().replacen("factorgen.manifest", "other.manifest", 1);
    assert!(Manifest::from_text(&text).is_err());
    let mut bad = Plan::empty(Difficulty::Easy);
    bad.counts.insert(Subtest::Vz3, 1);
    assert!(build_corpus(&bad, 1, dir.path()).is_err());
}

#[test]
fn prompts_are_complete_and_images_exist() {
    let dir = tempfile::tempdir().unwrap();
    let m = build_corpus(&small(Difficulty::Normal), 21, dir.path()).unwrap();
    for (item, q) in m.queries() {
        let msg = assemble_prompt(item, q, dir.path()).unwrap();
        assert!(!msg.text.contains("{{"), "{}", q.query_id);
        assert!(msg.text.trim_end().lines().last().unwrap().starts_with("Reply with only a JSON object"));
        assert!(!msg.images.is_empty());
        for p in &msg.images {
            assert!(std::fs::read(p).unwrap().starts_with(b"\x89PNG"));
        }
        if !q.choices.is_empty() {
            let gold = factorgen_harness::transport::gold_text(&q.gold);
            assert!(q.choices.contains(&gold), "{}: {gold} not among {:?}", q.query_id, q.choices);
        }
    }
}
