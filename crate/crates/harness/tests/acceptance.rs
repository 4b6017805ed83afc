//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines are always printed.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use factorgen_core::closure::{contains_model, contains_model_scan, extract_model, gen_cf2, normalize_model};
use factorgen_core::folding::paper::back_propagate;
use factorgen_core::folding::{gen_vz1, gen_vz2, verify_tiling, Vz1Params, Vz2Params};
use factorgen_core::geometry::{GridPoint, QPoint};
use factorgen_core::mapplan::{count_paths_dfs, count_shortest_paths, street_edges, StreetGraph};
use factorgen_core::scoring::{chance_table, simulate_random, GroundTruth, Subtest};
use factorgen_core::spatial::cube::cube_same_exhaustive;
use factorgen_core::spatial::{cube_same, gen_s2_item, CubeView, FaceMark};
use factorgen_core::{Difficulty, SeededRng};
use factorgen_harness::corpus::{build_corpus, validate};
use factorgen_harness::manifest::{Manifest, Plan};
use factorgen_harness::report::{score, Reduction};
use factorgen_harness::transcript::{Transcript, TranscriptHeader, TranscriptRow};
use factorgen_harness::transport::gold_text;
use rand::seq::SliceRandom;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

const REFERENCE_CHANCE: [(Subtest, f64); 20] = [
    (Subtest::Cf1, 3.13),
    (Subtest::Cf2, 3.13),
    (Subtest::Cf3, 4.00),
    (Subtest::Cs1, 0.00),
    (Subtest::Cs2, 0.00),
    (Subtest::Cs3, 0.00),
    (Subtest::P3, 3.13),
    (Subtest::I3, 0.23),
    (Subtest::Rl2, 3.13),
    (Subtest::Ma1, 4.76),
    (Subtest::Mv1, 6.25),
    (Subtest::Mv2, 3.13),
    (Subtest::Mv3, 6.25),
    (Subtest::S1, 0.39),
    (Subtest::S2, 6.25),
    (Subtest::Ss2, 3.13),
    (Subtest::Ss3, 1.00),
    (Subtest::Vz1, 3.13),
    (Subtest::Vz2, 3.13),
    (Subtest::Vz3, 3.65),
];

fn chance() -> Outcome {
    let (rows, mean) = chance_table();
    let got: BTreeMap<Subtest, f64> = rows.iter().map(|r| (r.subtest, r.chance)).collect();
    check(got.len() == 20, || format!("{} rows", got.len()))?;
    for (s, want) in REFERENCE_CHANCE {
        let v = got[&s];
        check((v - want).abs() <= 0.005 + 1e-9, || format!("{s}: {v:.4} vs {want}"))?;
    }
    check((mean - 2.89).abs() <= 0.01, || format!("mean {mean:.4}"))?;
    Ok(format!("20 subtests, mean {mean:.4}"))
}

fn simulation() -> Outcome {
    let mut rng = SeededRng::new(20_240_601);
    let mut worst: f64 = 0.0;
    for s in Subtest::ALL {
        let sim = simulate_random(&s.group_format(), 100_000, &mut rng).map_err(|e| e.to_string())?;
        check(sim.within(3.0), || format!("{s}: {:.5} vs {:.5}", sim.rate(), sim.expected))?;
        if sim.sigma() > 0.0 {
            worst = worst.max((sim.rate() - sim.expected).abs() / sim.sigma());
        }
    }
    Ok(format!("20 formats x 1e5 groups, worst deviation {worst:.2} sigma"))
}

fn random_view(rng: &mut SeededRng) -> CubeView {
    let mut pool = ['A', 'N', 'O', 'F', '2', 'S'];
    pool.shuffle(rng);
    let mut mark = |c| FaceMark::new(c, rng.index(4) as u8);
    CubeView { up: mark(pool[0]), front: mark(pool[1]), right: mark(pool[2]) }
}

fn oracles() -> Outcome {
    let mut rng = SeededRng::new(500);
    for i in 0..500 {
        let (a, b) = if i % 2 == 0 {
            let item = gen_s2_item(rng.coin(), &mut rng).map_err(|e| e.to_string())?;
            (item.first, item.second)
        } else {
            (random_view(&mut rng), random_view(&mut rng))
        };
        check(cube_same(&a, &b) == cube_same_exhaustive(&a, &b), || format!("cube pair {i}: {a:?} / {b:?}"))?;
    }

    let mut rng = SeededRng::new(300);
    for i in 0..300 {
        let (rows, cols) = (2 + rng.index(4), 2 + rng.index(4));
        let mut edges = street_edges(rows, cols);
        let keep = edges.len() * (55 + rng.index(45)) / 100;
        edges.shuffle(&mut rng);
        edges.truncate(keep);
        let g = StreetGraph::from_edges(&edges);
        let s = GridPoint::new(rng.index(rows) as i32, rng.index(cols) as i32);
        let t = GridPoint::new(rng.index(rows) as i32, rng.index(cols) as i32);
        if let Some(pc) = count_shortest_paths(&g, s, t) {
            let dfs = count_paths_dfs(&g, s, t, pc.distance);
            check(pc.count.to_string() == dfs.to_string(), || format!("graph {i}: {} vs {dfs}", pc.count))?;
        }
    }

    let mut rng = SeededRng::new(200);
    for i in 0..200 {
        let pattern = gen_cf2(4, 4, 0.4, 0.1, &mut rng).map_err(|e| e.to_string())?;
        let donor = gen_cf2(4, 4, 0.4, 0.1, &mut rng).map_err(|e| e.to_string())?;
        let size = 1 + rng.index(5);
        let model = normalize_model(&extract_model(&donor.edges, size, &mut rng));
        check(contains_model(&model, &pattern) == contains_model_scan(&model, &pattern), || format!("pair {i}"))?;
    }
    Ok("500 cube pairs, 300 graphs, 200 pattern pairs agree".into())
}

fn sorted(mut v: Vec<QPoint>) -> Vec<QPoint> {
    v.sort_by(|a, b| a.lex_cmp(b));
    v
}

fn refold() -> Outcome {
    for seed in 0..200u64 {
        let folds = 1 + seed as usize % 5;
        let params = Vz2Params { min_folds: folds, max_folds: folds, min_punches: 1, max_punches: 3 };
        let item = gen_vz2(&params, &mut SeededRng::new(seed)).map_err(|e| e.to_string())?;
        let state = item.state().map_err(|e| e.to_string())?;
        let mut by_layers = Vec::new();
        let mut with_mult = Vec::new();
        for p in &item.punches {
            let layers = state.layers_at(*p).map_err(|e| e.to_string())?;
            let back = back_propagate(&item.folds, *p).map_err(|e| e.to_string())?;
            check(back.len() == layers, || format!("seed {seed}: {} holes over {layers} layers", back.len()))?;
            by_layers.extend(back);
            with_mult.extend(std::iter::repeat_n(*p, layers));
        }
        check(sorted(by_layers) == sorted(item.holes.clone()), || format!("seed {seed}: hole sets differ"))?;
        let refolded = sorted(item.holes.iter().map(|h| state.refold(*h)).collect());
        check(refolded == sorted(with_mult), || format!("seed {seed}: refold misses a punch"))?;
    }
    Ok("200 seeds, 1-5 folds, 1-3 punches".into())
}

fn vz1() -> Outcome {
    let params = Vz1Params::preset(Difficulty::Normal);
    for seed in 0..200 {
        let item = gen_vz1(&params, &mut SeededRng::new(seed)).map_err(|e| e.to_string())?;
        let chosen: Vec<_> = item.solution.iter().map(|&i| item.pieces[i].clone()).collect();
        check(verify_tiling(&chosen, &item.target).is_some(), || format!("seed {seed}: solution does not tile"))?;
        let a = item.areas();
        let distinct = (0..a.len()).all(|i| (i + 1..a.len()).all(|j| a[i] != a[j]));
        check(distinct, || format!("seed {seed}: repeated area"))?;
        check(item.matching_subsets() == vec![item.solution_mask()], || format!("seed {seed}: alternate subset"))?;
    }
    Ok("200 seeds tile, distinct areas, unique subset".into())
}

fn files(dir: &std::path::Path) -> Vec<(std::path::PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let bytes = std::fs::read(&p).unwrap();
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), bytes));
            }
        }
    }
    out.sort();
    out
}

const NORMAL_COUNTS: [(Subtest, usize, usize); 12] = [
    (Subtest::Cf1, 32, 160),
    (Subtest::Cf2, 80, 400),
    (Subtest::Cf3, 64, 64),
    (Subtest::Cs1, 20, 20),
    (Subtest::Cs2, 50, 50),
    (Subtest::Cs3, 24, 24),
    (Subtest::Ma1, 42, 42),
    (Subtest::S1, 20, 160),
    (Subtest::S2, 42, 168),
    (Subtest::Ss3, 40, 80),
    (Subtest::Vz1, 48, 240),
    (Subtest::Vz2, 20, 100),
];

fn corpus(a: &std::path::Path, b: &std::path::Path) -> Result<(String, Manifest), String> {
    let plan = Plan::reference(Difficulty::Normal);
    let m = build_corpus(&plan, 2024, a).map_err(|e| e.to_string())?;
    let counts = m.counts();
    for (s, items, queries) in NORMAL_COUNTS {
        check(counts.get(&s) == Some(&(items, queries)), || format!("{s}: {:?}", counts.get(&s)))?;
    }
    check(counts.len() == 12, || format!("{} subtests", counts.len()))?;
    let report = validate(&m, Some(a));
    check(report.ok(), || format!("{} mismatches, first {:?}", report.mismatches.len(), report.mismatches.first()))?;
    let again = build_corpus(&plan, 2024, b).map_err(|e| e.to_string())?;
    check(again.digest() == m.digest(), || "manifest digest differs".into())?;
    let (fa, fb) = (files(a), files(b));
    check(fa == fb, || "corpus files differ".into())?;
    let detail = format!(
        "{} items, {} queries, {} images re-rendered, {} files identical",
        report.items,
        report.queries,
        report.images_checked,
        fa.len()
    );
    Ok((detail, m))
}

fn answered(m: &Manifest, answer: impl Fn(&GroundTruth) -> String) -> Transcript {
    let rows = m
        .queries()
        .map(|(i, q)| TranscriptRow {
            query_id: q.query_id.clone(),
            item_id: i.item_id.clone(),
            subtest: i.subtest,
            participant: None,
            prompt: String::new(),
            raw_response: Some(serde_json::json!({ "answer": answer(&q.gold) }).to_string()),
            normalized: None,
            latency_ms: 0,
            attempts: 1,
            failure: None,
            submitted_at_ms: None,
        })
        .collect();
    Transcript { header: TranscriptHeader::new("fixture", m.digest()), rows }
}

fn scoring(m: &Manifest) -> Outcome {
    let yes = answered(m, |g| match g {
        GroundTruth::Bool(_) => "TRUE".into(),
        other => gold_text(other),
    });
    let t = score(m, &yes, Reduction::Majority, false).map_err(|e| e.to_string())?;
    check(t.subtests[&Subtest::S2].accuracy == 0.0, || format!("constant yes on S2: {}", t.subtests[&Subtest::S2].accuracy))?;
    for s in [Subtest::Cf3, Subtest::Ma1, Subtest::Ss3, Subtest::Cs1] {
        check(t.subtests[&s].accuracy == 100.0, || format!("constant yes on {s}"))?;
    }
    let perfect = score(m, &answered(m, gold_text), Reduction::Majority, false).map_err(|e| e.to_string())?;
    check(perfect.total == 100.0 && perfect.subtests.values().all(|s| s.accuracy == 100.0), || {
        format!("perfect total {}", perfect.total)
    })?;

    // Wrong on every S2 statement and on CF3 items with an even index: S2 0,
    // CF3 50, the other ten 100, so the total is 1050 / 12.
    let mixed = Transcript {
        rows: answered(m, gold_text)
            .rows
            .into_iter()
            .map(|mut r| {
                let idx: usize = r.item_id[r.item_id.len() - 4..].parse().unwrap();
                if r.subtest == Subtest::S2 || (r.subtest == Subtest::Cf3 && idx.is_multiple_of(2)) {
                    r.raw_response = Some(r#"{"answer": "no idea"}"#.into());
                }
                r
            })
            .collect(),
        ..answered(m, gold_text)
    };
    let t = score(m, &mixed, Reduction::Majority, false).map_err(|e| e.to_string())?;
    check(t.subtests[&Subtest::S2].accuracy == 0.0 && t.subtests[&Subtest::Cf3].accuracy == 50.0, || {
        "mixed fixture per-subtest".into()
    })?;
    check((t.total - 1050.0 / 12.0).abs() < 1e-9, || format!("mixed total {}", t.total))?;
    Ok(format!("constant-yes S2 0.00, perfect 100.00, mixed {:.4}", t.total))
}

fn run(name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let started = Instant::now();
    let outcome = f();
    let took = started.elapsed();
    let ok = outcome.is_ok() && took <= limit;
    let detail = match outcome {
        Ok(d) if took <= limit => d,
        Ok(d) => format!("{d}; over the {:.0?} budget", limit),
        Err(e) => e,
    };
    println!("{} {name}: {detail} [{:.2?}]", if ok { "PASS" } else { "FAIL" }, took);
    ok
}

fn main() {
    let secs = Duration::from_secs;
    let mut all = vec![
        run("chance table", secs(1), chance),
        run("random-responder simulation", secs(30), simulation),
        run("oracle equivalence", secs(60), oracles),
        run("paper-fold refold round trip", secs(60), refold),
        run("form-board validity", secs(300), vz1),
    ];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut manifest = None;
    all.push(run("corpus reproduction", secs(300), || {
        corpus(a.path(), b.path()).map(|(d, m)| {
            manifest = Some(m);
            d
        })
    }));
    all.push(run("scoring fixtures", secs(60), || match &manifest {
        Some(m) => scoring(m),
        None => Err("no corpus".into()),
    }));
    let passed = all.iter().filter(|ok| **ok).count();
    println!("{passed}/{} acceptance criteria passed", all.len());
    if passed != all.len() {
        std::process::exit(1);
    }
}
