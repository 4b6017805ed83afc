//! Map-planning items (SS3): street lattices with roadblocks and corner
//! buildings, where exactly one shortest route exists between two labelled
//! perimeter intersections and that route passes exactly one building.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::difficulty::Difficulty;
use crate::error::{Error, Result};
use crate::geometry::{Color, Edge, EdgeSet, GridPoint, Point, Primitive, Scene, Stroke};
use crate::rng::SeededRng;

pub const MAX_ATTEMPTS: usize = 1000;

/// Undirected unit-weight graph over lattice nodes.
#[derive(Debug, Clone, Default)]
pub struct StreetGraph {
    adj: BTreeMap<GridPoint, Vec<GridPoint>>,
}

impl StreetGraph {
    pub fn from_edges<'a>(edges: impl IntoIterator<Item = &'a Edge>) -> Self {
        let mut adj: BTreeMap<GridPoint, Vec<GridPoint>> = BTreeMap::new();
        for e in edges {
            adj.entry(e.0).or_default().push(e.1);
            adj.entry(e.1).or_default().push(e.0);
        }
        Self { adj }
    }

    pub fn neighbors(&self, p: GridPoint) -> &[GridPoint] {
        self.adj.get(&p).map_or(&[], Vec::as_slice)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCount {
    pub distance: usize,
    pub count: BigUint,
    /// One shortest route from source to target; the only one when `count == 1`.
    pub geodesic: Vec<GridPoint>,
}

/// Breadth-first layers with path-count accumulation. `None` when `t` is
/// unreachable from `s`.
pub fn count_shortest_paths(g: &StreetGraph, s: GridPoint, t: GridPoint) -> Option<PathCount> {
    let mut dist: BTreeMap<GridPoint, usize> = BTreeMap::from([(s, 0)]);
    let mut ways: BTreeMap<GridPoint, BigUint> = BTreeMap::from([(s, BigUint::one())]);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        if dist.get(&t).is_some_and(|&dt| du >= dt) {
            break;
        }
        let wu = ways[&u].clone();
        for &v in g.neighbors(u) {
            match dist.get(&v) {
                None => {
                    dist.insert(v, du + 1);
                    ways.insert(v, wu.clone());
                    queue.push_back(v);
                }
                Some(&dv) if dv == du + 1 => *ways.get_mut(&v).expect("counted with distance") += &wu,
                Some(_) => {}
            }
        }
    }
    let distance = *dist.get(&t)?;
    let mut geodesic = vec![t];
    let mut cur = t;
    while cur != s {
        let d = dist[&cur];
        cur = *g
            .neighbors(cur)
            .iter()
            .filter(|v| dist.get(v) == Some(&(d - 1)))
            .min()
            .expect("every non-source layer node has a predecessor");
        geodesic.push(cur);
    }
    geodesic.reverse();
    Some(PathCount { distance, count: ways.remove(&t).unwrap_or_else(BigUint::zero), geodesic })
}

/// Which quadrant of its cell a building fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corner {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::TopLeft, Corner::TopRight, Corner::BottomLeft, Corner::BottomRight];

    fn offsets(self) -> (i32, i32) {
        match self {
            Corner::TopLeft => (0, 0),
            Corner::TopRight => (0, 1),
            Corner::BottomLeft => (1, 0),
            Corner::BottomRight => (1, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Building {
    /// Cell addressed by its top-left node.
    pub cell: GridPoint,
    pub corner: Corner,
    pub number: u32,
}

impl Building {
    pub fn corner_node(&self) -> GridPoint {
        let (dr, dc) = self.corner.offsets();
        self.cell.offset(dr, dc)
    }

    /// The two cell sides the quarter square lies against.
    pub fn abutting_edges(&self) -> [Edge; 2] {
        let p = self.corner_node();
        let (dr, dc) = self.corner.offsets();
        let inward_r = if dr == 0 { 1 } else { -1 };
        let inward_c = if dc == 0 { 1 } else { -1 };
        [Edge::new(p, p.offset(0, inward_c)), Edge::new(p, p.offset(inward_r, 0))]
    }
}

/// All horizontal and vertical unit edges of a `rows x cols` node lattice.
pub fn street_edges(rows: usize, cols: usize) -> Vec<Edge> {
    let mut out = Vec::new();
    for r in 0..rows as i32 {
        for c in 0..cols as i32 {
            let p = GridPoint::new(r, c);
            if c + 1 < cols as i32 {
                out.push(Edge::new(p, p.offset(0, 1)));
            }
            if r + 1 < rows as i32 {
                out.push(Edge::new(p, p.offset(1, 0)));
            }
        }
    }
    out
}

/// Boundary nodes clockwise from the top-left corner.
pub fn perimeter_nodes(rows: usize, cols: usize) -> Vec<GridPoint> {
    let (r, c) = (rows as i32 - 1, cols as i32 - 1);
    let top = (0..c).map(|j| GridPoint::new(0, j));
    let right = (0..r).map(|i| GridPoint::new(i, c));
    let bottom = (1..=c).rev().map(|j| GridPoint::new(r, j));
    let left = (1..=r).rev().map(|i| GridPoint::new(i, 0));
    top.chain(right).chain(bottom).chain(left).collect()
}

/// Spreadsheet-style column name: 0 -> A, 25 -> Z, 26 -> AA.
pub fn spreadsheet_label(mut i: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ASCII letters")
}

/// Buildings whose abutting sides are traversed by `path`; corner contact is ignored.
pub fn buildings_touched(path: &[GridPoint], buildings: &[Building]) -> Vec<u32> {
    let used: BTreeSet<Edge> = path.windows(2).map(|w| Edge::new(w[0], w[1])).collect();
    buildings
        .iter()
        .filter(|b| b.abutting_edges().iter().any(|e| used.contains(e)))
        .map(|b| b.number)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ss3Params {
    pub rows: usize,
    pub cols: usize,
    pub removal: f64,
    pub buildings: usize,
    /// Shortest admissible start-end distance.
    pub min_distance: usize,
}

impl Ss3Params {
    pub fn preset(d: Difficulty) -> Self {
        match d {
            Difficulty::Easy => Self { rows: 5, cols: 5, removal: 0.10, buildings: 4, min_distance: 3 },
            Difficulty::Normal => Self { rows: 7, cols: 7, removal: 0.15, buildings: 10, min_distance: 4 },
            Difficulty::Hard => Self { rows: 9, cols: 9, removal: 0.20, buildings: 12, min_distance: 5 },
        }
    }

    fn validate(&self) -> Result<()> {
        if self.rows < 4 || self.cols < 4 {
            return Err(Error::InvalidDimension { rows: self.rows, cols: self.cols });
        }
        if !(0.0..1.0).contains(&self.removal) {
            return Err(Error::param(format!("removal fraction {} outside [0, 1)", self.removal)));
        }
        if self.buildings > (self.rows - 1) * (self.cols - 1) {
            return Err(Error::param(format!("{} buildings exceed the cell count", self.buildings)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapInstance {
    pub rows: usize,
    pub cols: usize,
    pub blocked: EdgeSet,
    pub buildings: Vec<Building>,
    pub start: GridPoint,
    pub end: GridPoint,
    pub geodesic: Vec<GridPoint>,
    pub answer: u32,
}

impl MapInstance {
    pub fn streets(&self) -> Vec<Edge> {
        street_edges(self.rows, self.cols).into_iter().filter(|e| !self.blocked.contains(e)).collect()
    }

    pub fn graph(&self) -> StreetGraph {
        StreetGraph::from_edges(&self.streets())
    }

    pub fn labels(&self) -> Vec<(GridPoint, String)> {
        perimeter_nodes(self.rows, self.cols).into_iter().enumerate().map(|(i, p)| (p, spreadsheet_label(i))).collect()
    }

    pub fn label_of(&self, p: GridPoint) -> Option<String> {
        self.labels().into_iter().find(|(q, _)| *q == p).map(|(_, l)| l)
    }

    /// The same map asked in the opposite direction.
    pub fn reversed(&self) -> MapInstance {
        let mut geodesic = self.geodesic.clone();
        geodesic.reverse();
        MapInstance { start: self.end, end: self.start, geodesic, ..self.clone() }
    }

    pub fn verify(&self) -> bool {
        let streets: BTreeSet<Edge> = self.streets().into_iter().collect();
        let cells: BTreeSet<GridPoint> = self.buildings.iter().map(|b| b.cell).collect();
        let numbers: BTreeSet<u32> = self.buildings.iter().map(|b| b.number).collect();
        let placed = cells.len() == self.buildings.len()
            && numbers.len() == self.buildings.len()
            && self.buildings.iter().all(|b| b.abutting_edges().iter().all(|e| streets.contains(e)));
        let Some(pc) = count_shortest_paths(&self.graph(), self.start, self.end) else {
            return false;
        };
        placed
            && pc.count.is_one()
            && pc.geodesic == self.geodesic
            && buildings_touched(&self.geodesic, &self.buildings) == vec![self.answer]
    }

    pub fn scene(&self) -> Scene {
        const SIZE: f64 = 600.0;
        const MARGIN: f64 = 60.0;
        let step = (SIZE - 2.0 * MARGIN) / (self.rows.max(self.cols) - 1) as f64;
        let at = |p: GridPoint| Point::new(MARGIN + p.col as f64 * step, MARGIN + p.row as f64 * step);
        let mut s = Scene::new(SIZE, SIZE);
        for e in self.streets() {
            s.line(at(e.0), at(e.1), 3.0);
        }
        for e in &self.blocked {
            let m = at(e.0).add(at(e.1)).scale(0.5);
            s.push(1, Primitive::Circle { center: m, radius: step * 0.12, fill: Some(Color::WHITE), stroke: Some(Stroke::black(3.0)) });
        }
        let inset = step * 0.08;
        let side = step * 0.42;
        for b in &self.buildings {
            let c = at(b.corner_node());
            let (dr, dc) = b.corner.offsets();
            let sx = if dc == 0 { 1.0 } else { -1.0 };
            let sy = if dr == 0 { 1.0 } else { -1.0 };
            let near = Point::new(c.x + sx * inset, c.y + sy * inset);
            let far = Point::new(c.x + sx * (inset + side), c.y + sy * (inset + side));
            let pts = vec![near, Point::new(far.x, near.y), far, Point::new(near.x, far.y)];
            s.push(0, Primitive::Polygon { points: pts, fill: Some(Color::LIGHT), stroke: Some(Stroke::black(2.0)) });
            s.text(&b.number.to_string(), near.add(far).scale(0.5), side * 0.5, 2.5);
        }
        let centre = Point::new(MARGIN + (self.cols - 1) as f64 * step / 2.0, MARGIN + (self.rows - 1) as f64 * step / 2.0);
        for (p, label) in self.labels() {
            let q = at(p);
            let dir = Point::new(
                if p.col == 0 { -1.0 } else if p.col as usize == self.cols - 1 { 1.0 } else { 0.0 },
                if p.row == 0 { -1.0 } else if p.row as usize == self.rows - 1 { 1.0 } else { 0.0 },
            );
            let dir = if dir.norm() == 0.0 { q.sub(centre).scale(1.0 / q.sub(centre).norm()) } else { dir.scale(1.0 / dir.norm()) };
            s.text(&label, q.add(dir.scale(26.0)), 16.0, 2.0);
        }
        s
    }
}

/// Samples a blocked map and searches terminal pairs in random order until
/// the route is unique and touches exactly one building.
pub fn gen_ss3(params: &Ss3Params, rng: &mut SeededRng) -> Result<MapInstance> {
    params.validate()?;
    let (rows, cols) = (params.rows, params.cols);
    for _ in 0..MAX_ATTEMPTS {
        let mut edges = street_edges(rows, cols);
        edges.shuffle(rng);
        let k = (params.removal * edges.len() as f64).floor() as usize;
        let blocked: EdgeSet = edges[..k].iter().copied().collect();
        let open: BTreeSet<Edge> = edges[k..].iter().copied().collect();

        let mut slots: Vec<(GridPoint, Corner)> = (0..rows as i32 - 1)
            .flat_map(|r| (0..cols as i32 - 1).flat_map(move |c| Corner::ALL.map(|k| (GridPoint::new(r, c), k))))
            .collect();
        slots.shuffle(rng);
        let mut numbers: Vec<u32> = (1..=params.buildings as u32).collect();
        numbers.shuffle(rng);
        let mut buildings = Vec::with_capacity(params.buildings);
        let mut used = BTreeSet::new();
        for (cell, corner) in slots {
            if buildings.len() == params.buildings {
                break;
            }
            let b = Building { cell, corner, number: numbers[buildings.len()] };
            if !used.contains(&cell) && b.abutting_edges().iter().all(|e| open.contains(e)) {
                used.insert(cell);
                buildings.push(b);
            }
        }
        if buildings.len() < params.buildings {
            continue;
        }

        let graph = StreetGraph::from_edges(&open);
        let perimeter = perimeter_nodes(rows, cols);
        let mut pairs: Vec<(GridPoint, GridPoint)> = perimeter
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| perimeter[i + 1..].iter().map(move |&b| (a, b)))
            .collect();
        pairs.shuffle(rng);
        for (a, b) in pairs {
            let (start, end) = if rng.coin() { (a, b) } else { (b, a) };
            let Some(pc) = count_shortest_paths(&graph, start, end) else { continue };
            if pc.distance < params.min_distance || !pc.count.is_one() {
                continue;
            }
            let touched = buildings_touched(&pc.geodesic, &buildings);
            if let [answer] = touched[..] {
                return Ok(MapInstance { rows, cols, blocked, buildings, start, end, geodesic: pc.geodesic, answer });
            }
        }
    }
    Err(Error::GenerationFailed { what: "map planning", seed: rng.seed(), attempts: MAX_ATTEMPTS })
}

/// Number of simple paths of exactly `len` steps from `s` to `t`, by exhaustive
/// depth-first enumeration. A slow reference for [`count_shortest_paths`].
pub fn count_paths_dfs(g: &StreetGraph, s: GridPoint, t: GridPoint, len: usize) -> u64 {
    let mut seen = BTreeSet::from([s]);
    dfs_count(g, s, t, len, &mut seen)
}

fn dfs_count(g: &StreetGraph, cur: GridPoint, t: GridPoint, left: usize, seen: &mut BTreeSet<GridPoint>) -> u64 {
    if cur == t {
        return (left == 0) as u64;
    }
    if left == 0 {
        return 0;
    }
    let mut total = 0;
    for &v in g.neighbors(cur) {
        if seen.insert(v) {
            total += dfs_count(g, v, t, left - 1, seen);
            seen.remove(&v);
        }
    }
    total
}
