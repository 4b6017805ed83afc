//! Closure-flexibility items: hidden figures (CF1), hidden patterns (CF2)
//! and copying walks (CF3).

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::difficulty::Difficulty;
use crate::error::{Error, Result};
use crate::geometry::{
    collinear_overlap, Color, Edge, EdgeSet, GridPoint, Lattice, Point, Primitive, Scene, Segment, Stroke,
    DEFAULT_STROKE,
};
use crate::rng::SeededRng;

pub const MAX_ATTEMPTS: usize = 1000;

/// Edge count of a model figure cut from a pattern.
pub const MODEL_EDGES: (usize, usize) = (3, 6);

const CELL: f64 = 100.0;
const MARGIN: f64 = 30.0;

/// A drawn pattern: an edge subset of an `rows x cols` lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternGraph {
    pub rows: usize,
    pub cols: usize,
    pub edges: EdgeSet,
}

impl PatternGraph {
    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.rows, self.cols).expect("pattern dimensions validated at construction")
    }

    pub fn is_connected(&self) -> bool {
        let lattice = self.lattice();
        let mut uf = UnionFind::new(lattice.node_count());
        for e in &self.edges {
            uf.union(lattice.index_of(e.0), lattice.index_of(e.1));
        }
        let root = uf.find(0);
        (0..lattice.node_count()).all(|i| uf.find(i) == root)
    }

    pub fn density(&self) -> f64 {
        self.edges.len() as f64 / self.lattice().admissible.len() as f64
    }

    pub fn scene(&self) -> Scene {
        edge_scene(self.rows, self.cols, &self.edges)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

fn node_xy(p: GridPoint) -> Point {
    Point::new(MARGIN + p.col as f64 * CELL, MARGIN + p.row as f64 * CELL)
}

fn edge_scene(rows: usize, cols: usize, edges: &EdgeSet) -> Scene {
    let mut scene = Scene::new(
        2.0 * MARGIN + (cols.max(1) - 1) as f64 * CELL,
        2.0 * MARGIN + (rows.max(1) - 1) as f64 * CELL,
    );
    for e in edges {
        scene.line(node_xy(e.0), node_xy(e.1), DEFAULT_STROKE);
    }
    scene
}

fn check_density(density: f64, density_std: f64, allow_zero: bool) -> Result<()> {
    let low_ok = if allow_zero { density >= 0.0 } else { density > 0.0 };
    if !(low_ok && density <= 1.0) || density.is_nan() {
        return Err(Error::param(format!("density {density} outside the admissible range")));
    }
    if !density_std.is_finite() || density_std < 0.0 {
        return Err(Error::param(format!("density deviation {density_std} must be non-negative")));
    }
    Ok(())
}

/// Draws `round(Normal(rho E, (rho_std E)^2))` clipped to `[lo, hi]`.
fn target_count(e: usize, density: f64, density_std: f64, lo: usize, hi: usize, rng: &mut SeededRng) -> usize {
    let mu = density * e as f64;
    let sigma = density_std * e as f64;
    let draw = Normal::new(mu, sigma).expect("finite non-negative deviation").sample(rng);
    (draw.round().max(lo as f64).min(hi as f64)) as usize
}

fn neighbours(lattice: &Lattice) -> BTreeMap<GridPoint, Vec<GridPoint>> {
    let mut adj: BTreeMap<GridPoint, Vec<GridPoint>> = BTreeMap::new();
    for e in &lattice.admissible {
        adj.entry(e.0).or_default().push(e.1);
        adj.entry(e.1).or_default().push(e.0);
    }
    adj
}

/// Depth-first spanning tree with randomized successor order.
pub fn random_spanning_tree(lattice: &Lattice, rng: &mut SeededRng) -> EdgeSet {
    let adj = neighbours(lattice);
    let nodes: Vec<GridPoint> = lattice.nodes().collect();
    let start = nodes[rng.index(nodes.len())];
    let mut visited = BTreeSet::from([start]);
    let mut tree = EdgeSet::new();
    let shuffled = |p: GridPoint, rng: &mut SeededRng| {
        let mut next = adj[&p].clone();
        next.shuffle(rng);
        next
    };
    let mut stack = vec![(start, shuffled(start, rng), 0usize)];
    while let Some((node, succ, idx)) = stack.last_mut() {
        if *idx >= succ.len() {
            stack.pop();
            continue;
        }
        let next = succ[*idx];
        *idx += 1;
        if visited.insert(next) {
            tree.insert(Edge::new(*node, next));
            let order = shuffled(next, rng);
            stack.push((next, order, 0));
        }
    }
    tree
}

/// Connected pattern: a random spanning tree plus extra edges up to the sampled density.
pub fn gen_cf2(rows: usize, cols: usize, density: f64, density_std: f64, rng: &mut SeededRng) -> Result<PatternGraph> {
    check_density(density, density_std, false)?;
    let lattice = Lattice::new(rows, cols)?;
    let e = lattice.admissible.len();
    let n = lattice.node_count();
    let k = target_count(e, density, density_std, n - 1, e, rng);
    let mut edges = random_spanning_tree(&lattice, rng);
    let mut rest: Vec<Edge> = lattice.admissible.iter().copied().filter(|x| !edges.contains(x)).collect();
    rest.shuffle(rng);
    edges.extend(rest.into_iter().take(k - (n - 1)));
    Ok(PatternGraph { rows, cols, edges })
}

/// Pattern seeded with its perimeter rectangle, then filled uniformly to the sampled density.
pub fn gen_cf1(rows: usize, cols: usize, density: f64, density_std: f64, rng: &mut SeededRng) -> Result<PatternGraph> {
    check_density(density, density_std, true)?;
    let lattice = Lattice::new(rows, cols)?;
    let e = lattice.admissible.len();
    let k = target_count(e, density, density_std, 0, e, rng);
    let mut edges: EdgeSet = lattice.perimeter().into_iter().collect();
    let mut rest: Vec<Edge> = lattice.admissible.iter().copied().filter(|x| !edges.contains(x)).collect();
    rest.shuffle(rng);
    let extra = k.saturating_sub(edges.len());
    edges.extend(rest.into_iter().take(extra));
    Ok(PatternGraph { rows, cols, edges })
}

/// Translates a model so its smallest row and column are zero.
pub fn normalize_model(model: &EdgeSet) -> EdgeSet {
    let min_r = model.iter().map(|e| e.0.row.min(e.1.row)).min().unwrap_or(0);
    let min_c = model.iter().map(|e| e.0.col.min(e.1.col)).min().unwrap_or(0);
    model.iter().map(|e| e.translate(-min_r, -min_c)).collect()
}

/// Extent of a normalized model in nodes: (rows, cols).
pub fn model_extent(model: &EdgeSet) -> (usize, usize) {
    let m = normalize_model(model);
    let r = m.iter().map(|e| e.0.row.max(e.1.row)).max().unwrap_or(0);
    let c = m.iter().map(|e| e.0.col.max(e.1.col)).max().unwrap_or(0);
    (r as usize + 1, c as usize + 1)
}

pub fn model_scene(model: &EdgeSet) -> Scene {
    let m = normalize_model(model);
    let (r, c) = model_extent(&m);
    edge_scene(r, c, &m)
}

/// Translation-only containment: some shift maps every model edge onto a pattern edge.
pub fn contains_model(model: &EdgeSet, pattern: &PatternGraph) -> bool {
    let Some(anchor) = model.iter().next().map(|e| e.0) else {
        return false;
    };
    pattern_nodes(pattern).any(|p| {
        let (dr, dc) = (p.row - anchor.row, p.col - anchor.col);
        model.iter().all(|e| pattern.edges.contains(&e.translate(dr, dc)))
    })
}

fn pattern_nodes(pattern: &PatternGraph) -> impl Iterator<Item = GridPoint> {
    let cols = pattern.cols as i32;
    (0..pattern.rows as i32).flat_map(move |r| (0..cols).map(move |c| GridPoint::new(r, c)))
}

/// Connected subgraph of `size` edges grown edge-by-edge from a random seed edge.
pub fn extract_model(edges: &EdgeSet, size: usize, rng: &mut SeededRng) -> EdgeSet {
    let all: Vec<Edge> = edges.iter().copied().collect();
    let mut chosen = EdgeSet::new();
    if all.is_empty() {
        return chosen;
    }
    chosen.insert(all[rng.index(all.len())]);
    while chosen.len() < size {
        let frontier: Vec<Edge> = all
            .iter()
            .copied()
            .filter(|e| !chosen.contains(e) && chosen.iter().any(|c| c.touches(e.0) || c.touches(e.1)))
            .collect();
        match frontier.choose(rng) {
            Some(e) => {
                chosen.insert(*e);
            }
            None => break,
        }
    }
    chosen
}

/// Parameters of the CF1/CF2 pattern generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternParams {
    pub rows: usize,
    pub cols: usize,
    pub density: f64,
    pub density_std: f64,
}

impl PatternParams {
    pub fn cf1(d: Difficulty) -> Self {
        let n = d.pick(4, 5, 6);
        Self { rows: n, cols: n, density: 0.45, density_std: 0.05 }
    }

    pub fn cf2(d: Difficulty) -> Self {
        let n = d.pick(3, 4, 5);
        Self { rows: n, cols: n, density: 0.45, density_std: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CfKind {
    Cf1,
    Cf2,
}

/// One model/pattern judgment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfItem {
    pub kind: CfKind,
    pub model: EdgeSet,
    pub pattern: PatternGraph,
    pub truth: bool,
}

impl CfItem {
    pub fn verify(&self) -> bool {
        contains_model(&self.model, &self.pattern) == self.truth
    }
}

fn gen_pattern(kind: CfKind, p: &PatternParams, rng: &mut SeededRng) -> Result<PatternGraph> {
    match kind {
        CfKind::Cf1 => gen_cf1(p.rows, p.cols, p.density, p.density_std, rng),
        CfKind::Cf2 => gen_cf2(p.rows, p.cols, p.density, p.density_std, rng),
    }
}

fn model_size(rng: &mut SeededRng) -> usize {
    MODEL_EDGES.0 + rng.index(MODEL_EDGES.1 - MODEL_EDGES.0 + 1)
}

/// A model absent from `pattern`, cut from freshly generated patterns.
fn absent_model(kind: CfKind, p: &PatternParams, pattern: &PatternGraph, avoid: &[EdgeSet], rng: &mut SeededRng) -> Result<EdgeSet> {
    for _ in 0..MAX_ATTEMPTS {
        let donor = gen_pattern(kind, p, rng)?;
        let size = model_size(rng);
        let model = normalize_model(&extract_model(&donor.edges, size, rng));
        if model.len() >= MODEL_EDGES.0 && !contains_model(&model, pattern) && !avoid.contains(&model) {
            return Ok(model);
        }
    }
    Err(Error::GenerationFailed { what: "absent model", seed: rng.seed(), attempts: MAX_ATTEMPTS })
}

/// A single judgment whose truth is the planted flag, confirmed by the oracle.
pub fn make_cf_item(kind: CfKind, planted: bool, params: &PatternParams, rng: &mut SeededRng) -> Result<CfItem> {
    let pattern = gen_pattern(kind, params, rng)?;
    let model = if planted {
        let mut found = None;
        for _ in 0..MAX_ATTEMPTS {
            let size = model_size(rng);
            let m = normalize_model(&extract_model(&pattern.edges, size, rng));
            if m.len() >= MODEL_EDGES.0 {
                found = Some(m);
                break;
            }
        }
        found.ok_or(Error::GenerationFailed { what: "planted model", seed: rng.seed(), attempts: MAX_ATTEMPTS })?
    } else {
        absent_model(kind, params, &pattern, &[], rng)?
    };
    let item = CfItem { kind, model, pattern, truth: planted };
    if !item.verify() {
        return Err(Error::ItemDefinition("closure item disagrees with containment oracle".into()));
    }
    Ok(item)
}

/// CF1 question: one pattern, five candidate shapes, exactly one hidden in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cf1Question {
    pub pattern: PatternGraph,
    pub models: Vec<EdgeSet>,
    pub answer: usize,
}

impl Cf1Question {
    pub fn truths(&self) -> Vec<bool> {
        self.models.iter().map(|m| contains_model(m, &self.pattern)).collect()
    }
}

pub fn make_cf1_question(params: &PatternParams, rng: &mut SeededRng) -> Result<Cf1Question> {
    let planted = make_cf_item(CfKind::Cf1, true, params, rng)?;
    let mut models = vec![planted.model.clone()];
    while models.len() < 5 {
        let m = absent_model(CfKind::Cf1, params, &planted.pattern, &models, rng)?;
        models.push(m);
    }
    models.shuffle(rng);
    let answer = models.iter().position(|m| *m == planted.model).expect("planted model kept");
    let q = Cf1Question { pattern: planted.pattern, models, answer };
    let truths = q.truths();
    if truths.iter().filter(|t| **t).count() != 1 || !truths[answer] {
        return Err(Error::ItemDefinition("hidden-figure question must have exactly one present shape".into()));
    }
    Ok(q)
}

/// CF2 question: one model judged against five patterns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cf2Question {
    pub model: EdgeSet,
    pub patterns: Vec<PatternGraph>,
    pub truths: Vec<bool>,
}

impl Cf2Question {
    pub fn verify(&self) -> bool {
        self.patterns.iter().zip(&self.truths).all(|(p, t)| contains_model(&self.model, p) == *t)
    }
}

/// Embeds `model` at a random in-bounds translation.
fn embed(model: &EdgeSet, pattern: &mut PatternGraph, rng: &mut SeededRng) -> bool {
    let (mr, mc) = model_extent(model);
    if mr > pattern.rows || mc > pattern.cols {
        return false;
    }
    let dr = rng.index(pattern.rows - mr + 1) as i32;
    let dc = rng.index(pattern.cols - mc + 1) as i32;
    pattern.edges.extend(model.iter().map(|e| e.translate(dr, dc)));
    true
}

pub fn make_cf2_question(params: &PatternParams, rng: &mut SeededRng) -> Result<Cf2Question> {
    'model: for _ in 0..MAX_ATTEMPTS {
        let donor = gen_cf2(params.rows, params.cols, params.density, params.density_std, rng)?;
        let size = model_size(rng);
        let model = normalize_model(&extract_model(&donor.edges, size, rng));
        if model.len() < MODEL_EDGES.0 {
            continue;
        }
        let present = 1 + rng.index(4);
        let mut truths: Vec<bool> = (0..5).map(|i| i < present).collect();
        truths.shuffle(rng);
        let mut patterns = Vec::with_capacity(5);
        for &t in &truths {
            let mut found = None;
            for _ in 0..100 {
                let mut p = gen_cf2(params.rows, params.cols, params.density, params.density_std, rng)?;
                if t {
                    if embed(&model, &mut p, rng) {
                        found = Some(p);
                        break;
                    }
                } else if !contains_model(&model, &p) {
                    found = Some(p);
                    break;
                }
            }
            match found {
                Some(p) => patterns.push(p),
                None => continue 'model,
            }
        }
        let q = Cf2Question { model, patterns, truths };
        if !q.verify() {
            return Err(Error::ItemDefinition("hidden-pattern question disagrees with containment oracle".into()));
        }
        return Ok(q);
    }
    Err(Error::GenerationFailed { what: "hidden-pattern question", seed: rng.seed(), attempts: MAX_ATTEMPTS })
}

/// A self-avoiding lattice walk whose segments never overlap collinearly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkPath {
    pub start: GridPoint,
    pub points: Vec<GridPoint>,
}

impl WalkPath {
    pub fn segments(&self) -> Vec<Segment> {
        self.points
            .windows(2)
            .map(|w| Segment::new(grid_f(w[0]), grid_f(w[1])).expect("walk points are distinct"))
            .collect()
    }

    /// Per-step (row, col) displacements.
    pub fn moves(&self) -> Vec<(i32, i32)> {
        self.points.windows(2).map(|w| (w[1].row - w[0].row, w[1].col - w[0].col)).collect()
    }

    pub fn end(&self) -> GridPoint {
        *self.points.last().expect("walk has a start")
    }

    pub fn is_valid(&self) -> bool {
        let unique: BTreeSet<_> = self.points.iter().collect();
        if unique.len() != self.points.len() || self.points.first() != Some(&self.start) {
            return false;
        }
        let segs = self.segments();
        (0..segs.len()).all(|i| (i + 1..segs.len()).all(|j| !collinear_overlap(&segs[i], &segs[j])))
    }
}

fn grid_f(p: GridPoint) -> Point {
    Point::new(p.col as f64, p.row as f64)
}

/// Endpoint reached by replaying `moves` from `start`.
pub fn replay_walk(start: GridPoint, moves: &[(i32, i32)]) -> GridPoint {
    moves.iter().fold(start, |p, &(dr, dc)| p.offset(dr, dc))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cf3Params {
    pub rows: usize,
    pub cols: usize,
    pub min_steps: usize,
    pub max_steps: usize,
}

impl Cf3Params {
    pub fn preset(d: Difficulty) -> Self {
        let (n, lo, hi) = d.pick((4, 3, 4), (5, 4, 6), (6, 6, 8));
        Self { rows: n, cols: n, min_steps: lo, max_steps: hi }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cf3Item {
    pub params: Cf3Params,
    pub walk: WalkPath,
    /// One-based (row, col) of the final point.
    pub answer: (u32, u32),
}

impl Cf3Item {
    pub fn verify(&self) -> bool {
        self.walk.is_valid()
            && (self.params.min_steps..=self.params.max_steps).contains(&self.walk.moves().len())
            && replay_walk(self.walk.start, &self.walk.moves()).one_based() == self.answer
    }

    fn frame(&self) -> Scene {
        edge_scene(self.params.rows, self.params.cols, &EdgeSet::new())
    }

    /// The walk drawn without the grid, start node marked.
    pub fn shape_scene(&self) -> Scene {
        let mut s = self.frame();
        let pts: Vec<Point> = self.walk.points.iter().map(|p| node_xy(*p)).collect();
        s.push(0, Primitive::Polyline { points: pts, closed: false, stroke: Stroke::black(DEFAULT_STROKE) });
        s.disc(node_xy(self.walk.start), 9.0, Color::BLACK);
        s
    }

    /// The dot grid with the start node circled.
    pub fn grid_scene(&self) -> Scene {
        let mut s = self.frame();
        for r in 0..self.params.rows as i32 {
            for c in 0..self.params.cols as i32 {
                s.disc(node_xy(GridPoint::new(r, c)), 7.0, Color::BLACK);
            }
        }
        s.ring(node_xy(self.walk.start), 22.0, DEFAULT_STROKE);
        s
    }
}

/// Grows a walk of a random length in `[min_steps, max_steps]`, restarting on dead ends.
pub fn gen_cf3(params: Cf3Params, rng: &mut SeededRng) -> Result<Cf3Item> {
    gen_cf3_from(params, None, rng)
}

pub fn gen_cf3_from(params: Cf3Params, start: Option<GridPoint>, rng: &mut SeededRng) -> Result<Cf3Item> {
    let Cf3Params { rows, cols, min_steps, max_steps } = params;
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::InvalidDimension { rows, cols });
    }
    if min_steps == 0 || min_steps > max_steps || max_steps >= rows * cols {
        return Err(Error::param(format!("walk length range [{min_steps}, {max_steps}] invalid for {rows}x{cols}")));
    }
    let nodes: Vec<GridPoint> =
        (0..rows as i32).flat_map(|r| (0..cols as i32).map(move |c| GridPoint::new(r, c))).collect();
    for _ in 0..MAX_ATTEMPTS {
        let start = start.unwrap_or_else(|| nodes[rng.index(nodes.len())]);
        let steps = min_steps + rng.index(max_steps - min_steps + 1);
        let mut walk = WalkPath { start, points: vec![start] };
        let mut segs: Vec<Segment> = Vec::new();
        while walk.points.len() <= steps {
            let cur = walk.end();
            let candidates: Vec<(GridPoint, Segment)> = nodes
                .iter()
                .filter(|q| !walk.points.contains(q))
                .map(|q| (*q, Segment::new(grid_f(cur), grid_f(*q)).expect("distinct nodes")))
                .filter(|(_, s)| segs.iter().all(|old| !collinear_overlap(old, s)))
                .collect();
            let Some((next, seg)) = candidates.choose(rng).cloned() else {
                break;
            };
            walk.points.push(next);
            segs.push(seg);
        }
        if walk.points.len() == steps + 1 {
            let answer = walk.end().one_based();
            return Ok(Cf3Item { params, walk, answer });
        }
    }
    Err(Error::GenerationFailed { what: "copying walk", seed: rng.seed(), attempts: MAX_ATTEMPTS })
}

/// Tries every translation in a window around the pattern. A slow reference
/// for [`contains_model`].
pub fn contains_model_scan(model: &EdgeSet, pattern: &PatternGraph) -> bool {
    let span = (pattern.rows.max(pattern.cols) * 2) as i32;
    for dr in -span..=span {
        for dc in -span..=span {
            if model.iter().all(|e| pattern.edges.contains(&e.translate(dr, dc))) {
                return true;
            }
        }
    }
    false
}
