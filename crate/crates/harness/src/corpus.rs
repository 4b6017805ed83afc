//! Corpus generation and oracle re-validation.

use std::collections::BTreeMap;
use std::path::Path;

use factorgen_core::closure::{self, contains_model, replay_walk, Cf3Params, PatternParams};
use factorgen_core::folding::{gen_vz1, gen_vz2, Vz1Params, Vz2Params};
use factorgen_core::geometry::{encode_png, render_native, Image, Scene};
use factorgen_core::mapplan::{gen_ss3, Ss3Params};
use factorgen_core::memory::{gen_ma1, pair_count, TileSource};
use factorgen_core::occlusion::{self, catalog, make_cs_item, CsKind};
use factorgen_core::rng::derive_seed;
use factorgen_core::scoring::{
    decompose_mcq, make_symmetry_variants, ss3_bidirectional, yes_no_parts, AnswerKind, Direction, GroundTruth,
    MemberSpec, Statement, Subtest, Variant, VariantGroup,
};
use factorgen_core::spatial::cube::view_scene;
use factorgen_core::spatial::{cube_same, gen_s2_item, make_s1_item, PolygonParams};
use factorgen_core::{Difficulty, SeededRng};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::manifest::{ImageRef, ItemRecord, Manifest, Payload, Plan, QueryRecord};

/// A manifest record with its rendered images, keyed by corpus-relative path.
pub type BuiltItem = (ItemRecord, Vec<(String, Vec<u8>)>);

const YES_NO: [&str; 2] = ["TRUE", "FALSE"];

fn png(img: &Image) -> Vec<u8> {
    encode_png(img)
}

fn scene_png(scene: &Scene) -> Result<Vec<u8>> {
    Ok(png(&render_native(scene)?))
}

pub fn item_id(subtest: Subtest, index: usize) -> String {
    format!("{}-{index:04}", subtest.code())
}

/// Catalog index for the `index`-th silhouette item, without repeats until the catalog is exhausted.
fn silhouette_for(subtest: Subtest, master_seed: u64, index: usize) -> usize {
    let mut order: Vec<usize> = (0..catalog().len()).collect();
    let mut rng = SeededRng::new(derive_seed(master_seed, &format!("{}-catalog", subtest.code()), 0));
    order.shuffle(&mut rng);
    order[index % order.len()]
}

fn snapshot<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("parameters serialize")
}

fn generate(subtest: Subtest, d: Difficulty, master_seed: u64, index: usize, rng: &mut SeededRng) -> Result<(Payload, serde_json::Value)> {
    Ok(match subtest {
        Subtest::Cf1 => {
            let p = PatternParams::cf1(d);
            (Payload::HiddenFigures(closure::make_cf1_question(&p, rng)?), snapshot(&p))
        }
        Subtest::Cf2 => {
            let p = PatternParams::cf2(d);
            (Payload::HiddenPatterns(closure::make_cf2_question(&p, rng)?), snapshot(&p))
        }
        Subtest::Cf3 => {
            let p = Cf3Params::preset(d);
            (Payload::Copying(closure::gen_cf3(p, rng)?), snapshot(&p))
        }
        Subtest::Cs1 | Subtest::Cs3 => {
            let kind = if subtest == Subtest::Cs1 { CsKind::Cs1 } else { CsKind::Cs3 };
            let asset = silhouette_for(subtest, master_seed, index);
            let item = make_cs_item(kind, d, Some(asset), rng)?;
            (Payload::Occlusion(item), serde_json::json!({ "difficulty": d, "asset": asset }))
        }
        Subtest::Cs2 => {
            let (lo, hi) = occlusion::word_lengths(d);
            let item = make_cs_item(CsKind::Cs2, d, None, rng)?;
            (Payload::Occlusion(item), serde_json::json!({ "difficulty": d, "word_lengths": [lo, hi] }))
        }
        Subtest::Ma1 => {
            let n = pair_count(d);
            let item = gen_ma1(n, TileSource::Semantic, rng)?;
            (Payload::PictureNumber(item), serde_json::json!({ "pairs": n, "source": TileSource::Semantic }))
        }
        Subtest::S1 => {
            let p = PolygonParams::preset(d);
            (Payload::CardRotation(make_s1_item(&p, rng)?), snapshot(&p))
        }
        Subtest::S2 => {
            let want_same = index.is_multiple_of(2);
            (Payload::CubePair(gen_s2_item(want_same, rng)?), serde_json::json!({ "want_same": want_same }))
        }
        Subtest::Ss3 => {
            let p = Ss3Params::preset(d);
            (Payload::MapPlan(gen_ss3(&p, rng)?), snapshot(&p))
        }
        Subtest::Vz1 => {
            let p = Vz1Params::preset(d);
            (Payload::FormBoard(gen_vz1(&p, rng)?), snapshot(&p))
        }
        Subtest::Vz2 => {
            let p = Vz2Params::preset(d);
            (Payload::PaperFold(gen_vz2(&p, rng)?), snapshot(&p))
        }
        other => return Err(HarnessError::Config(format!("{other} items are not generated by this tool"))),
    })
}

fn subtest_of(p: &Payload) -> Subtest {
    match p {
        Payload::HiddenFigures(_) => Subtest::Cf1,
        Payload::HiddenPatterns(_) => Subtest::Cf2,
        Payload::Copying(_) => Subtest::Cf3,
        Payload::Occlusion(i) => match i.kind {
            CsKind::Cs1 => Subtest::Cs1,
            CsKind::Cs2 => Subtest::Cs2,
            CsKind::Cs3 => Subtest::Cs3,
        },
        Payload::PictureNumber(_) => Subtest::Ma1,
        Payload::CardRotation(_) => Subtest::S1,
        Payload::CubePair(_) => Subtest::S2,
        Payload::MapPlan(_) => Subtest::Ss3,
        Payload::FormBoard(_) => Subtest::Vz1,
        Payload::PaperFold(_) => Subtest::Vz2,
    }
}

fn item_error(what: &str) -> HarnessError {
    HarnessError::Core(factorgen_core::Error::ItemDefinition(format!("{what} failed its oracle check")))
}

/// Gold labels re-derived from the payload by the owning module's oracle.
pub fn oracle_members(p: &Payload) -> Result<Vec<MemberSpec>> {
    Ok(match p {
        Payload::HiddenFigures(q) => {
            let truths: Vec<bool> = q.models.iter().map(|m| contains_model(m, &q.pattern)).collect();
            decompose_mcq(&truths)?
        }
        Payload::HiddenPatterns(q) => {
            let truths: Vec<bool> = q.patterns.iter().map(|pat| contains_model(&q.model, pat)).collect();
            if q.patterns.len() != 5 {
                return Err(item_error("hidden-pattern question"));
            }
            yes_no_parts(&truths)
        }
        Payload::Copying(item) => {
            if !item.verify() {
                return Err(item_error("copying item"));
            }
            let (r, c) = replay_walk(item.walk.start, &item.walk.moves()).one_based();
            vec![MemberSpec { variant: Variant::Single, gold: GroundTruth::Pair(i64::from(r), i64::from(c)) }]
        }
        Payload::Occlusion(item) => {
            if !item.verify() {
                return Err(item_error("occlusion item"));
            }
            let gold = match item.kind {
                CsKind::Cs2 => GroundTruth::Exact(item.label.clone()),
                _ => GroundTruth::Aliases(item.accepted.clone()),
            };
            vec![MemberSpec { variant: Variant::Single, gold }]
        }
        Payload::PictureNumber(item) => {
            if !item.verify() {
                return Err(item_error("picture-number item"));
            }
            vec![MemberSpec { variant: Variant::Single, gold: GroundTruth::Number(i64::from(item.answer())) }]
        }
        Payload::CardRotation(item) => {
            if !item.verify() {
                return Err(item_error("card-rotation item"));
            }
            yes_no_parts(&item.truths())
        }
        Payload::CubePair(item) => {
            if !(item.first.is_valid() && item.second.is_valid()) {
                return Err(item_error("cube pair"));
            }
            make_symmetry_variants(cube_same(&item.first, &item.second))
        }
        Payload::MapPlan(inst) => {
            let rev = inst.reversed();
            if !inst.verify() || !rev.verify() || rev.answer != inst.answer {
                return Err(item_error("map-planning item"));
            }
            ss3_bidirectional(inst.answer)
        }
        Payload::FormBoard(item) => {
            if !item.verify() {
                return Err(item_error("form-board item"));
            }
            yes_no_parts(&item.truths())
        }
        Payload::PaperFold(item) => {
            if !item.verify() {
                return Err(item_error("paper-folding item"));
            }
            decompose_mcq(&item.truths())?
        }
    })
}

/// Stimulus images by role, in a fixed order.
pub fn render_images(p: &Payload) -> Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    match p {
        Payload::HiddenFigures(q) => {
            out.push(("pattern".to_string(), scene_png(&q.pattern.scene())?));
            for (k, m) in q.models.iter().enumerate() {
                out.push((format!("shape{}", k + 1), scene_png(&closure::model_scene(m))?));
            }
        }
        Payload::HiddenPatterns(q) => {
            out.push(("model".to_string(), scene_png(&closure::model_scene(&q.model))?));
            for (k, pat) in q.patterns.iter().enumerate() {
                out.push((format!("pattern{}", k + 1), scene_png(&pat.scene())?));
            }
        }
        Payload::Copying(item) => {
            out.push(("shape".to_string(), scene_png(&item.shape_scene())?));
            out.push(("grid".to_string(), scene_png(&item.grid_scene())?));
        }
        Payload::Occlusion(item) => out.push(("stimulus".to_string(), png(&item.image()?))),
        Payload::PictureNumber(item) => {
            out.push(("sheet".to_string(), png(&item.sheet_image()?)));
            out.push(("probe".to_string(), png(&item.probe_image()?)));
        }
        Payload::CardRotation(item) => {
            out.push(("target".to_string(), scene_png(&item.target_scene())?));
            for k in 0..item.views.len() {
                out.push((format!("view{}", k + 1), scene_png(&item.view_scene(k))?));
            }
        }
        Payload::CubePair(item) => {
            out.push(("first".to_string(), scene_png(&view_scene(&item.first))?));
            out.push(("second".to_string(), scene_png(&view_scene(&item.second))?));
        }
        Payload::MapPlan(inst) => out.push(("map".to_string(), scene_png(&inst.scene())?)),
        Payload::FormBoard(item) => {
            out.push(("target".to_string(), scene_png(&item.target_scene())?));
            for k in 0..item.pieces.len() {
                out.push((format!("piece{}", k + 1), scene_png(&item.piece_scene(k))?));
            }
        }
        Payload::PaperFold(item) => {
            out.push(("folds".to_string(), scene_png(&item.sequence_scene()?)?));
            for k in 0..item.candidates.len() {
                out.push((format!("candidate{}", k + 1), scene_png(&item.candidate_scene(k))?));
            }
        }
    }
    Ok(out)
}

fn statement_text(s: Statement) -> &'static str {
    match s {
        Statement::AMatchesB => "cube A, turned suitably, can look exactly like cube B",
        Statement::ADiffersB => "no way of turning cube A makes it look exactly like cube B",
        Statement::BMatchesA => "cube B, turned suitably, can look exactly like cube A",
        Statement::BDiffersA => "no way of turning cube B makes it look exactly like cube A",
    }
}

struct Layout {
    template: &'static str,
    slots: BTreeMap<String, String>,
    images: Vec<String>,
    answer: AnswerKind,
    choices: Vec<String>,
}

fn yes_no_layout(template: &'static str, images: Vec<String>) -> Layout {
    Layout {
        template,
        slots: BTreeMap::new(),
        images,
        answer: AnswerKind::YesNo,
        choices: YES_NO.iter().map(|s| s.to_string()).collect(),
    }
}

fn index_of(v: &Variant) -> usize {
    match v {
        Variant::Option { index } | Variant::Part { index } => *index,
        _ => 0,
    }
}

fn layout(p: &Payload, d: Difficulty, member: &MemberSpec) -> Layout {
    let k = index_of(&member.variant) + 1;
    match p {
        Payload::HiddenFigures(_) => yes_no_layout("cf1", vec![format!("shape{k}"), "pattern".into()]),
        Payload::HiddenPatterns(_) => yes_no_layout("cf2", vec!["model".into(), format!("pattern{k}")]),
        Payload::Copying(item) => {
            let (rows, cols) = (item.params.rows, item.params.cols);
            let choices = (1..=rows).flat_map(|r| (1..=cols).map(move |c| format!("({r}, {c})"))).collect();
            let slots = [("rows", rows.to_string()), ("cols", cols.to_string())];
            Layout {
                template: "cf3",
                slots: slots.into_iter().map(|(a, b)| (a.to_string(), b)).collect(),
                images: vec!["shape".into(), "grid".into()],
                answer: AnswerKind::Pair,
                choices,
            }
        }
        Payload::Occlusion(item) => {
            let (template, slots) = match item.kind {
                CsKind::Cs1 => ("cs1", BTreeMap::new()),
                CsKind::Cs2 => {
                    ("cs2", BTreeMap::from([("min_len".to_string(), occlusion::word_lengths(d).0.to_string())]))
                }
                CsKind::Cs3 => ("cs3", BTreeMap::new()),
            };
            Layout { template, slots, images: vec!["stimulus".into()], answer: AnswerKind::Text, choices: vec![] }
        }
        Payload::PictureNumber(item) => {
            let mut numbers = item.numbers.clone();
            numbers.sort_unstable();
            Layout {
                template: "ma1",
                slots: BTreeMap::from([("pairs".to_string(), item.n().to_string())]),
                images: vec!["sheet".into(), "probe".into()],
                answer: AnswerKind::Number,
                choices: numbers.iter().map(u8::to_string).collect(),
            }
        }
        Payload::CardRotation(_) => yes_no_layout("s1", vec!["target".into(), format!("view{k}")]),
        Payload::CubePair(_) => {
            let mut l = yes_no_layout("s2", vec!["first".into(), "second".into()]);
            if let Variant::Statement { statement } = member.variant {
                l.slots.insert("statement".into(), statement_text(statement).into());
            }
            l
        }
        Payload::MapPlan(inst) => {
            let (a, b) = match member.variant {
                Variant::Route { direction: Direction::Reversed } => (inst.end, inst.start),
                _ => (inst.start, inst.end),
            };
            let label = |p| inst.label_of(p).unwrap_or_default();
            let mut numbers: Vec<u32> = inst.buildings.iter().map(|b| b.number).collect();
            numbers.sort_unstable();
            Layout {
                template: "ss3",
                slots: BTreeMap::from([("start".to_string(), label(a)), ("end".to_string(), label(b))]),
                images: vec!["map".into()],
                answer: AnswerKind::Number,
                choices: numbers.iter().map(u32::to_string).collect(),
            }
        }
        Payload::FormBoard(item) => {
            let mut images = vec!["target".to_string()];
            images.extend((1..=item.pieces.len()).map(|i| format!("piece{i}")));
            let mut l = yes_no_layout("vz1", images);
            l.slots.insert("piece".into(), k.to_string());
            l
        }
        Payload::PaperFold(_) => yes_no_layout("vz2", vec!["folds".into(), format!("candidate{k}")]),
    }
}

/// Builds the manifest record for a payload: ids, group, queries and image references.
pub fn make_record(subtest: Subtest, index: usize, seed: u64, d: Difficulty, params: serde_json::Value, payload: Payload) -> Result<BuiltItem> {
    let id = item_id(subtest, index);
    let members = oracle_members(&payload)?;
    let rendered = render_images(&payload)?;
    let images: Vec<ImageRef> = rendered
        .iter()
        .map(|(role, _)| ImageRef { role: role.clone(), path: format!("images/{}/{id}-{role}.png", subtest.code()) })
        .collect();
    let queries: Vec<QueryRecord> = members
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let l = layout(&payload, d, m);
            QueryRecord {
                query_id: format!("{id}-q{}", k + 1),
                template: l.template.to_string(),
                slots: l.slots,
                images: l.images,
                variant: m.variant.clone(),
                answer: l.answer,
                choices: l.choices,
                gold: m.gold.clone(),
            }
        })
        .collect();
    let group = VariantGroup { id: id.clone(), members: queries.iter().map(|q| q.query_id.clone()).collect() };
    let files = images.iter().zip(rendered).map(|(r, (_, bytes))| (r.path.clone(), bytes)).collect();
    let record = ItemRecord {
        subtest,
        item_id: id,
        seed,
        difficulty: d,
        format: subtest.group_format(),
        group,
        images,
        queries,
        params,
        payload,
    };
    Ok((record, files))
}

fn build_one(subtest: Subtest, index: usize, d: Difficulty, master_seed: u64) -> Result<BuiltItem> {
    let seed = derive_seed(master_seed, subtest.code(), index as u64);
    let mut rng = SeededRng::new(seed);
    let wrap = |e: HarnessError| match e {
        HarnessError::Core(source) => HarnessError::Generation { subtest, index, seed, source },
        other => other,
    };
    let (payload, params) = generate(subtest, d, master_seed, index, &mut rng).map_err(wrap)?;
    make_record(subtest, index, seed, d, params, payload).map_err(wrap)
}

/// Generates, oracle-checks and writes every planned item, then the manifest.
pub fn build_corpus(plan: &Plan, master_seed: u64, out: &Path) -> Result<Manifest> {
    plan.validate()?;
    let jobs: Vec<(Subtest, usize)> =
        plan.counts.iter().flat_map(|(&s, &n)| (0..n).map(move |i| (s, i))).collect();
    let built: Vec<BuiltItem> = jobs
        .par_iter()
        .map(|&(s, i)| build_one(s, i, plan.difficulty, master_seed))
        .collect::<Result<_>>()?;
    std::fs::create_dir_all(out).map_err(HarnessError::io(out))?;
    built.par_iter().flat_map(|(_, files)| files.par_iter()).try_for_each(|(rel, bytes)| {
        let path = out.join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(HarnessError::io(dir))?;
        }
        std::fs::write(&path, bytes).map_err(HarnessError::io(&path))
    })?;
    let manifest = Manifest::new(master_seed, plan.clone(), built.into_iter().map(|(r, _)| r).collect());
    manifest.write(out)?;
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub items: usize,
    pub queries: usize,
    pub images_checked: usize,
    pub mismatches: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn check_item(item: &ItemRecord, corpus_dir: Option<&Path>) -> (usize, Vec<String>) {
    let mut bad = Vec::new();
    let id = &item.item_id;
    if subtest_of(&item.payload) != item.subtest {
        bad.push(format!("{id}: payload belongs to {}", subtest_of(&item.payload)));
    }
    if item.format != item.subtest.group_format() {
        bad.push(format!("{id}: format {} differs from {}", item.format, item.subtest.group_format()));
    }
    match oracle_members(&item.payload) {
        Err(e) => bad.push(format!("{id}: {e}")),
        Ok(members) => {
            if members.len() != item.queries.len() {
                bad.push(format!("{id}: oracle yields {} queries, manifest has {}", members.len(), item.queries.len()));
            }
            for (m, q) in members.iter().zip(&item.queries) {
                if m.gold != q.gold || m.variant != q.variant {
                    bad.push(format!("{}: stored gold {:?} but oracle says {:?}", q.query_id, q.gold, m.gold));
                }
            }
        }
    }
    if item.queries.len() != item.format.query_count() {
        bad.push(format!("{id}: {} queries for format {}", item.queries.len(), item.format));
    }
    let members: Vec<&String> = item.queries.iter().map(|q| &q.query_id).collect();
    if item.group.members.iter().collect::<Vec<_>>() != members {
        bad.push(format!("{id}: variant group members disagree with queries"));
    }
    let mut checked = 0;
    if let Some(dir) = corpus_dir {
        match render_images(&item.payload) {
            Err(e) => bad.push(format!("{id}: re-render failed: {e}")),
            Ok(rendered) => {
                for ((role, bytes), r) in rendered.iter().zip(&item.images) {
                    checked += 1;
                    if *role != r.role {
                        bad.push(format!("{id}: image role {} expected {role}", r.role));
                        continue;
                    }
                    match std::fs::read(dir.join(&r.path)) {
                        Ok(disk) if disk == *bytes => {}
                        Ok(_) => bad.push(format!("{id}: {} differs from its re-render", r.path)),
                        Err(e) => bad.push(format!("{id}: {}: {e}", r.path)),
                    }
                }
            }
        }
    }
    (checked, bad)
}

/// Re-confirms every stored gold label with its oracle; with `corpus_dir`,
/// also re-renders every image and compares it byte for byte.
pub fn validate(manifest: &Manifest, corpus_dir: Option<&Path>) -> ValidationReport {
    let results: Vec<(usize, Vec<String>)> = manifest.items.par_iter().map(|i| check_item(i, corpus_dir)).collect();
    let mut mismatches = Vec::new();
    let mut images_checked = 0;
    for (n, bad) in results {
        images_checked += n;
        mismatches.extend(bad);
    }
    let mut seen = std::collections::BTreeSet::new();
    for (_, q) in manifest.queries() {
        if !seen.insert(q.query_id.as_str()) {
            mismatches.push(format!("duplicate query id {}", q.query_id));
        }
    }
    let mut seeds = std::collections::BTreeSet::new();
    for item in &manifest.items {
        if !seeds.insert((item.subtest, item.seed)) {
            mismatches.push(format!("{}: seed reused within {}", item.item_id, item.subtest));
        }
    }
    ValidationReport {
        items: manifest.items.len(),
        queries: manifest.queries().count(),
        images_checked,
        mismatches,
    }
}
