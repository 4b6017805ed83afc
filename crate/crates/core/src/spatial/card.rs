//! Card rotation items (S1): rotated versus mirrored-and-rotated polygons.

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Color, Point, Primitive, Scene, Segment, Stroke, DEFAULT_STROKE};
use crate::rng::SeededRng;

pub const MAX_ATTEMPTS: usize = 1000;
pub const VIEWS_PER_CARD: usize = 8;
/// Mirrored views avoid this many degrees around 0 and 180.
pub const MIRROR_EXCLUSION_DEG: f64 = 2.0;
const SYMMETRY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolygonParams {
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub min_edge_len: f64,
    pub diff_tol: f64,
}

impl Default for PolygonParams {
    fn default() -> Self {
        Self { min_vertices: 5, max_vertices: 8, min_edge_len: 0.25, diff_tol: 0.05 }
    }
}

impl PolygonParams {
    pub fn preset(d: crate::Difficulty) -> Self {
        let (min_vertices, max_vertices) = d.pick((5, 6), (5, 8), (7, 10));
        Self { min_vertices, max_vertices, ..Self::default() }
    }
}

/// A simple polygon whose vertex centroid sits at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplePolygon {
    pub vertices: Vec<Point>,
}

impl SimplePolygon {
    pub fn edge_lengths(&self) -> Vec<f64> {
        let n = self.vertices.len();
        (0..n).map(|i| self.vertices[i].dist(self.vertices[(i + 1) % n])).collect()
    }

    pub fn is_simple(&self) -> bool {
        is_simple(&self.vertices)
    }

    pub fn radius(&self) -> f64 {
        self.vertices.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    pub fn satisfies(&self, p: &PolygonParams) -> bool {
        let lens = self.edge_lengths();
        let n = lens.len();
        n >= 3
            && self.is_simple()
            && lens.iter().all(|l| *l >= p.min_edge_len)
            && (0..n).all(|i| (lens[i] - lens[(i + 1) % n]).abs() >= p.diff_tol)
            && !is_mirror_symmetric(&self.vertices)
    }
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o = |p: Point, q: Point, r: Point| q.sub(p).cross(r.sub(p));
    let (d1, d2, d3, d4) = (o(a, b, c), o(a, b, d), o(c, d, a), o(c, d, b));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: Point, q: Point, r: Point, v: f64| {
        v.abs() <= 1e-12 && r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4)
}

/// No two non-adjacent edges meet.
pub fn is_simple(v: &[Point]) -> bool {
    let n = v.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// True when some reflection maps the polygon onto itself.
pub fn is_mirror_symmetric(v: &[Point]) -> bool {
    let n = v.len();
    let edge = |i: usize| v[i % n].dist(v[(i + 1) % n]);
    let angle = |i: usize| {
        let prev = v[(i + n - 1) % n].sub(v[i % n]);
        let next = v[(i + 1) % n].sub(v[i % n]);
        prev.cross(next).atan2(prev.dot(next))
    };
    // Alternating (edge_i, angle at vertex i+1); a reflection reverses it cyclically.
    let seq: Vec<f64> = (0..n).flat_map(|i| [edge(i), angle(i + 1)]).collect();
    let rev: Vec<f64> = seq.iter().rev().copied().collect();
    let m = seq.len();
    // `rev` starts with an angle, so only odd shifts align edges with edges. Mirroring
    // and reversing the traversal each flip the turn sign, so signed angles match.
    (0..m).filter(|s| s % 2 == 1).any(|s| (0..m).all(|k| (seq[k] - rev[(k + s) % m]).abs() <= SYMMETRY_TOL))
}

fn vertex_centroid(v: &[Point]) -> Point {
    let sum = v.iter().fold(Point::new(0.0, 0.0), |a, p| a.add(*p));
    sum.scale(1.0 / v.len() as f64)
}

/// Random polar polygon, resampled until all filters pass.
pub fn gen_s1_polygon(params: &PolygonParams, rng: &mut SeededRng) -> Result<SimplePolygon> {
    if params.min_vertices < 4 || params.min_vertices > params.max_vertices {
        return Err(Error::param("polygon needs 4 <= min_vertices <= max_vertices"));
    }
    if !(params.min_edge_len > 0.0 && params.diff_tol > 0.0) {
        return Err(Error::param("polygon thresholds must be positive"));
    }
    for _ in 0..MAX_ATTEMPTS {
        let n = params.min_vertices + rng.index(params.max_vertices - params.min_vertices + 1);
        let mut angles: Vec<f64> = (0..n).map(|_| rng.unit() * TAU).collect();
        angles.sort_by(|a, b| a.total_cmp(b));
        let raw: Vec<Point> = angles
            .iter()
            .map(|t| {
                let r = 0.35 + 0.65 * rng.unit();
                Point::new(r * t.cos(), r * t.sin())
            })
            .collect();
        let c = vertex_centroid(&raw);
        let poly = SimplePolygon { vertices: raw.iter().map(|p| p.sub(c)).collect() };
        if poly.satisfies(params) {
            return Ok(poly);
        }
    }
    Err(Error::GenerationFailed { what: "card polygon", seed: rng.seed(), attempts: MAX_ATTEMPTS })
}

/// One test view: optional horizontal mirror, then a rotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardView {
    pub mirrored: bool,
    pub angle_deg: f64,
    pub vertices: Vec<Point>,
}

impl CardView {
    /// Same card up to rotation.
    pub fn truth(&self) -> bool {
        !self.mirrored
    }
}

pub fn transform(base: &SimplePolygon, mirrored: bool, angle_deg: f64) -> Vec<Point> {
    let t = angle_deg.to_radians();
    base.vertices
        .iter()
        .map(|p| {
            let m = if mirrored { Point::new(-p.x, p.y) } else { *p };
            m.rotate(t)
        })
        .collect()
}

/// Undoes [`transform`].
pub fn untransform(view: &CardView) -> Vec<Point> {
    let t = -view.angle_deg.to_radians();
    view.vertices
        .iter()
        .map(|p| {
            let r = p.rotate(t);
            if view.mirrored {
                Point::new(-r.x, r.y)
            } else {
                r
            }
        })
        .collect()
}

fn near_degenerate(angle: f64) -> bool {
    let a = angle.rem_euclid(180.0);
    !(MIRROR_EXCLUSION_DEG..=180.0 - MIRROR_EXCLUSION_DEG).contains(&a)
}

pub fn gen_s1_view(base: &SimplePolygon, mirrored: bool, rng: &mut SeededRng) -> CardView {
    let mut angle = rng.unit() * 360.0;
    while mirrored && near_degenerate(angle) {
        angle = rng.unit() * 360.0;
    }
    CardView { mirrored, angle_deg: angle, vertices: transform(base, mirrored, angle) }
}

/// A card with its eight test views, half of them mirrored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardItem {
    pub base: SimplePolygon,
    pub views: Vec<CardView>,
}

impl CardItem {
    pub fn truths(&self) -> Vec<bool> {
        self.views.iter().map(CardView::truth).collect()
    }

    /// Replays each view from its stored flags and checks the inverse transform.
    pub fn verify(&self) -> bool {
        self.base.is_simple()
            && !is_mirror_symmetric(&self.base.vertices)
            && self.views.iter().all(|v| {
                let replay = transform(&self.base, v.mirrored, v.angle_deg);
                let back = untransform(v);
                replay.iter().zip(&v.vertices).all(|(a, b)| a.approx_eq(*b, 1e-9))
                    && back.iter().zip(&self.base.vertices).all(|(a, b)| a.approx_eq(*b, 1e-6))
            })
    }

    fn canvas_scale(&self) -> f64 {
        270.0 / self.base.radius()
    }

    pub fn target_scene(&self) -> Scene {
        polygon_scene(&self.base.vertices, self.canvas_scale())
    }

    pub fn view_scene(&self, i: usize) -> Scene {
        polygon_scene(&self.views[i].vertices, self.canvas_scale())
    }
}

fn polygon_scene(vertices: &[Point], scale: f64) -> Scene {
    let mut s = Scene::new(600.0, 600.0);
    let pts: Vec<Point> = vertices.iter().map(|p| Point::new(300.0 + p.x * scale, 300.0 - p.y * scale)).collect();
    s.push(0, Primitive::Polygon { points: pts, fill: Some(Color::LIGHT), stroke: Some(Stroke::black(DEFAULT_STROKE)) });
    s
}

pub fn make_s1_item(params: &PolygonParams, rng: &mut SeededRng) -> Result<CardItem> {
    let base = gen_s1_polygon(params, rng)?;
    let mut flags: Vec<bool> = (0..VIEWS_PER_CARD).map(|i| i < VIEWS_PER_CARD / 2).collect();
    flags.shuffle(rng);
    let views = flags.iter().map(|&m| gen_s1_view(&base, m, rng)).collect();
    Ok(CardItem { base, views })
}

/// Segments of a closed polygon, for external checks.
pub fn polygon_segments(v: &[Point]) -> Vec<Segment> {
    let n = v.len();
    (0..n).filter_map(|i| Segment::new(v[i], v[(i + 1) % n]).ok()).collect()
}
