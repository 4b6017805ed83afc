//! Cube comparison items (S2) and the 24-orientation identity test.
//!
//! World frame: x to the right, y away from the viewer, z up. A view shows
//! the faces whose outward normals are +z (up), -y (front) and +x (right).
//! Each face has a canonical "up" direction; a symbol's rotation counts
//! clockwise quarter turns (seen from outside) away from it.

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::font;
use crate::geometry::{Color, Point, Primitive, Scene, Stroke};
use crate::rng::SeededRng;

pub const MAX_ATTEMPTS: usize = 1000;

pub type Vec3 = [i32; 3];
pub type Mat3 = [[i32; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symmetry {
    Fourfold,
    Twofold,
    Asymmetric,
}

impl Symmetry {
    /// Smallest number of quarter turns that leaves the symbol unchanged.
    pub fn period(self) -> u8 {
        match self {
            Symmetry::Fourfold => 1,
            Symmetry::Twofold => 2,
            Symmetry::Asymmetric => 4,
        }
    }
}

pub const FOURFOLD: [char; 2] = ['+', 'O'];
pub const TWOFOLD: [char; 6] = ['N', 'S', 'Z', 'H', 'I', 'X'];
pub const ASYMMETRIC: [char; 10] = ['A', 'F', 'G', 'J', 'L', 'P', 'R', '2', '4', '7'];

pub fn alphabet() -> Vec<char> {
    FOURFOLD.iter().chain(&TWOFOLD).chain(&ASYMMETRIC).copied().collect()
}

pub fn symmetry(symbol: char) -> Option<Symmetry> {
    if FOURFOLD.contains(&symbol) {
        Some(Symmetry::Fourfold)
    } else if TWOFOLD.contains(&symbol) {
        Some(Symmetry::Twofold)
    } else if ASYMMETRIC.contains(&symbol) {
        Some(Symmetry::Asymmetric)
    } else {
        None
    }
}

/// Rotations `a`, `b` look identical for `symbol`.
pub fn equivalent(symbol: char, a: u8, b: u8) -> bool {
    let p = symmetry(symbol).map_or(4, Symmetry::period);
    (a % 4 + 4 - b % 4).is_multiple_of(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Face {
    Up,
    Down,
    Front,
    Back,
    Right,
    Left,
}

impl Face {
    pub const ALL: [Face; 6] = [Face::Up, Face::Down, Face::Front, Face::Back, Face::Right, Face::Left];
    pub const VISIBLE: [Face; 3] = [Face::Up, Face::Front, Face::Right];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn normal(self) -> Vec3 {
        match self {
            Face::Up => [0, 0, 1],
            Face::Down => [0, 0, -1],
            Face::Front => [0, -1, 0],
            Face::Back => [0, 1, 0],
            Face::Right => [1, 0, 0],
            Face::Left => [-1, 0, 0],
        }
    }

    /// Canonical up direction of a symbol drawn on this face.
    pub fn canonical_up(self) -> Vec3 {
        match self {
            Face::Up | Face::Down => [0, 1, 0],
            _ => [0, 0, 1],
        }
    }

    pub fn from_normal(n: Vec3) -> Face {
        *Face::ALL.iter().find(|f| f.normal() == n).expect("axis-aligned unit normal")
    }
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn apply(m: &Mat3, v: Vec3) -> Vec3 {
    [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

pub fn transpose(m: &Mat3) -> Mat3 {
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| m[j][i]))
}

fn det(m: &Mat3) -> i32 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// The 24 proper rotations of the cube as signed permutation matrices.
pub fn rotation_group() -> Vec<Mat3> {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(24);
    for p in perms {
        for signs in 0..8 {
            let mut m = [[0; 3]; 3];
            for row in 0..3 {
                m[row][p[row]] = if signs >> row & 1 == 1 { -1 } else { 1 };
            }
            if det(&m) == 1 {
                out.push(m);
            }
        }
    }
    out
}

/// Clockwise quarter turn of `u` seen from outside the face with normal `n`.
pub fn turn_cw(u: Vec3, n: Vec3) -> Vec3 {
    cross(u, n)
}

fn turns_between(from: Vec3, to: Vec3, n: Vec3) -> u8 {
    let mut u = from;
    for k in 0..4 {
        if u == to {
            return k;
        }
        u = turn_cw(u, n);
    }
    panic!("{to:?} is not a quarter turn of {from:?} about {n:?}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaceMark {
    pub symbol: char,
    /// Clockwise quarter turns from the canonical orientation.
    pub rotation: u8,
}

impl FaceMark {
    pub fn new(symbol: char, rotation: u8) -> Self {
        Self { symbol, rotation: rotation % 4 }
    }

    pub fn degrees(&self) -> u32 {
        self.rotation as u32 * 90
    }
}

/// The up, front and right faces of one observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CubeView {
    pub up: FaceMark,
    pub front: FaceMark,
    pub right: FaceMark,
}

impl CubeView {
    pub fn marks(&self) -> [(Face, FaceMark); 3] {
        [(Face::Up, self.up), (Face::Front, self.front), (Face::Right, self.right)]
    }

    pub fn mark(&self, f: Face) -> Option<FaceMark> {
        self.marks().into_iter().find(|(g, _)| *g == f).map(|(_, m)| m)
    }

    pub fn is_valid(&self) -> bool {
        let s: BTreeSet<char> = self.marks().iter().map(|(_, m)| m.symbol).collect();
        s.len() == 3 && s.iter().all(|c| symmetry(*c).is_some()) && self.marks().iter().all(|(_, m)| m.rotation < 4)
    }
}

/// A fully labelled cube in its body frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cube {
    pub faces: [FaceMark; 6],
}

impl Cube {
    /// What the viewer sees after rotating the cube body by `g`.
    pub fn view(&self, g: &Mat3) -> CubeView {
        let gt = transpose(g);
        let see = |pos: Face| {
            let body = Face::from_normal(apply(&gt, pos.normal()));
            let mark = self.faces[body.index()];
            let body_up = (0..mark.rotation).fold(body.canonical_up(), |u, _| turn_cw(u, body.normal()));
            let seen_up = apply(g, body_up);
            FaceMark::new(mark.symbol, turns_between(pos.canonical_up(), seen_up, pos.normal()))
        };
        CubeView { up: see(Face::Up), front: see(Face::Front), right: see(Face::Right) }
    }

    pub fn is_valid(&self) -> bool {
        let s: BTreeSet<char> = self.faces.iter().map(|m| m.symbol).collect();
        s.len() == 6
    }
}

/// For each rotation and visible position: the body face shown there and the
/// quarter-turn offset that carries the body face's canonical up onto the
/// position's canonical up.
#[derive(Debug, Clone)]
pub struct OrientationTable {
    pub entries: Vec<[(Face, u8); 3]>,
}

impl OrientationTable {
    pub fn new() -> Self {
        let entries = rotation_group()
            .iter()
            .map(|g| {
                let gt = transpose(g);
                Face::VISIBLE.map(|pos| {
                    let body = Face::from_normal(apply(&gt, pos.normal()));
                    let carried = apply(g, body.canonical_up());
                    (body, turns_between(pos.canonical_up(), carried, pos.normal()))
                })
            })
            .collect();
        Self { entries }
    }
}

impl Default for OrientationTable {
    fn default() -> Self {
        Self::new()
    }
}

fn table() -> &'static OrientationTable {
    static TABLE: std::sync::OnceLock<OrientationTable> = std::sync::OnceLock::new();
    TABLE.get_or_init(OrientationTable::new)
}

/// True iff some rotation of the cube seen in `v1` can produce `v2`.
pub fn cube_same(v1: &CubeView, v2: &CubeView) -> bool {
    let first: BTreeSet<char> = v1.marks().iter().map(|(_, m)| m.symbol).collect();
    let second = v2.marks();
    table().entries.iter().any(|row| {
        row.iter().zip(second.iter()).all(|(&(body, offset), (_, seen))| match v1.mark(body) {
            Some(known) => known.symbol == seen.symbol && equivalent(seen.symbol, seen.rotation, known.rotation + offset),
            None => !first.contains(&seen.symbol),
        })
    })
}

/// Exhaustive check: complete v1's cube with every hidden-face labelling
/// drawn from v2's symbols or fresh placeholders, and look at it from all
/// 24 rotations.
pub fn cube_same_exhaustive(v1: &CubeView, v2: &CubeView) -> bool {
    let group = rotation_group();
    let fresh = ['a', 'b', 'c'];
    let mut pool: Vec<char> = v2.marks().iter().map(|(_, m)| m.symbol).collect();
    pool.extend(fresh);
    let hidden = [Face::Down, Face::Back, Face::Left];
    for s0 in &pool {
        for s1 in &pool {
            for s2 in &pool {
                for turns in 0..64u8 {
                    let mut faces = [FaceMark::new('?', 0); 6];
                    for (f, m) in v1.marks() {
                        faces[f.index()] = m;
                    }
                    for (k, (f, s)) in hidden.iter().zip([s0, s1, s2]).enumerate() {
                        faces[f.index()] = FaceMark::new(*s, (turns >> (2 * k)) & 3);
                    }
                    let cube = Cube { faces };
                    if !cube.is_valid() {
                        continue;
                    }
                    for g in &group {
                        let seen = cube.view(g);
                        let matches = seen.marks().iter().zip(v2.marks().iter()).all(|((_, a), (_, b))| {
                            a.symbol == b.symbol && equivalent(a.symbol, a.rotation, b.rotation)
                        });
                        if matches {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

pub fn random_cube(rng: &mut SeededRng) -> Cube {
    let mut symbols = alphabet();
    symbols.shuffle(rng);
    let faces = [0, 1, 2, 3, 4, 5].map(|i| FaceMark::new(symbols[i], rng.index(4) as u8));
    Cube { faces }
}

fn shown_faces(g: &Mat3) -> BTreeSet<Face> {
    let gt = transpose(g);
    Face::VISIBLE.iter().map(|p| Face::from_normal(apply(&gt, p.normal()))).collect()
}

/// A pair of views with its oracle verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeItem {
    pub cube: Cube,
    pub first: CubeView,
    pub second: CubeView,
    pub truth: bool,
}

impl CubeItem {
    pub fn verify(&self) -> bool {
        self.first.is_valid() && self.second.is_valid() && cube_same(&self.first, &self.second) == self.truth
    }
}

/// Builds a pair that is (or is not) consistent with a single cube.
pub fn gen_s2_item(want_same: bool, rng: &mut SeededRng) -> Result<CubeItem> {
    let group = rotation_group();
    for _ in 0..MAX_ATTEMPTS {
        let cube = random_cube(rng);
        let g1 = *group.choose(rng).expect("non-empty group");
        let first = cube.view(&g1);
        let seen1 = shown_faces(&g1);
        let candidates: Vec<&Mat3> =
            group.iter().filter(|g| **g != g1 && !shown_faces(g).is_disjoint(&seen1)).collect();
        let g2 = **candidates.choose(rng).expect("overlapping orientations exist");
        let mut second = cube.view(&g2);
        if !want_same {
            let used: BTreeSet<char> = cube.faces.iter().map(|m| m.symbol).collect();
            let slot = rng.index(3);
            let mark = second.marks()[slot].1;
            let changed = if rng.coin() || symmetry(mark.symbol) == Some(Symmetry::Fourfold) {
                let spare: Vec<char> = alphabet().into_iter().filter(|c| !used.contains(c)).collect();
                FaceMark::new(*spare.choose(rng).expect("alphabet exceeds six symbols"), mark.rotation)
            } else {
                let p = symmetry(mark.symbol).map_or(4, Symmetry::period);
                FaceMark::new(mark.symbol, mark.rotation + 1 + rng.index(p as usize - 1) as u8)
            };
            match slot {
                0 => second.up = changed,
                1 => second.front = changed,
                _ => second.right = changed,
            }
        }
        let truth = cube_same(&first, &second);
        if truth == want_same && second.is_valid() {
            return Ok(CubeItem { cube, first, second, truth });
        }
    }
    Err(Error::GenerationFailed { what: "cube pair", seed: rng.seed(), attempts: MAX_ATTEMPTS })
}

const EDGE: f64 = 300.0;
const ORIGIN: Point = Point::new(100.0, 500.0);

fn project(x: f64, y: f64, z: f64) -> Point {
    let d = 0.5 * std::f64::consts::FRAC_1_SQRT_2;
    Point::new(ORIGIN.x + EDGE * (x + d * y), ORIGIN.y - EDGE * (z + d * y))
}

fn face_point(face: Face, s: f64, t: f64) -> Point {
    match face {
        Face::Front => project(s, 0.0, t),
        Face::Right => project(1.0, s, t),
        _ => project(s, t, 1.0),
    }
}

/// Oblique drawing of the three visible faces with their rotated symbols.
pub fn view_scene(view: &CubeView) -> Scene {
    let mut scene = Scene::new(600.0, 600.0);
    for (face, mark) in view.marks() {
        let outline: Vec<Point> = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
            .iter()
            .map(|&(s, t)| face_point(face, s, t))
            .collect();
        scene.push(0, Primitive::Polygon { points: outline, fill: Some(Color::WHITE), stroke: Some(Stroke::black(4.0)) });
        for stroke in font::layout(&mark.symbol.to_string(), Point::new(0.0, 0.0), 0.55, mark.rotation) {
            let pts: Vec<Point> = stroke.iter().map(|p| face_point(face, 0.5 + p.x, 0.5 - p.y)).collect();
            scene.push(1, Primitive::Polyline { points: pts, closed: false, stroke: Stroke::black(7.0) });
        }
    }
    scene
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_view(rng: &mut SeededRng, pool: &[char]) -> CubeView {
        let mut p = pool.to_vec();
        p.shuffle(rng);
        CubeView {
            up: FaceMark::new(p[0], rng.index(4) as u8),
            front: FaceMark::new(p[1], rng.index(4) as u8),
            right: FaceMark::new(p[2], rng.index(4) as u8),
        }
    }

    #[test]
    fn group_has_24_distinct_proper_rotations() {
        let g = rotation_group();
        assert_eq!(g.len(), 24);
        let set: BTreeSet<_> = g.iter().collect();
        assert_eq!(set.len(), 24);
    }

    #[test]
    fn identity_pair_is_same() {
        let mut rng = SeededRng::new(1);
        for _ in 0..50 {
            let v = random_cube(&mut rng).view(&rotation_group()[0]);
            assert!(cube_same(&v, &v));
        }
    }

    #[test]
    fn replaced_symbol_is_different() {
        let v = CubeView { up: FaceMark::new('A', 0), front: FaceMark::new('F', 1), right: FaceMark::new('N', 2) };
        let w = CubeView { front: FaceMark::new('G', 1), ..v };
        assert!(!cube_same(&v, &w));
        assert!(!cube_same_exhaustive(&v, &w));
    }

    #[test]
    fn twofold_half_turn_is_same() {
        let v = CubeView { up: FaceMark::new('A', 0), front: FaceMark::new('N', 1), right: FaceMark::new('P', 2) };
        let w = CubeView { front: FaceMark::new('N', 3), ..v };
        assert!(cube_same(&v, &w));
        let asym = CubeView { front: FaceMark::new('F', 1), ..v };
        let asym_turned = CubeView { front: FaceMark::new('F', 3), ..v };
        assert!(!cube_same(&asym, &asym_turned));
    }

    #[test]
    fn every_reorientation_is_same() {
        let group = rotation_group();
        for seed in 0..40 {
            let cube = random_cube(&mut SeededRng::new(seed));
            let base = cube.view(&group[seed as usize % 24]);
            for g in &group {
                assert!(cube_same(&base, &cube.view(g)));
            }
        }
    }

    #[test]
    fn matches_matrix_oracle_on_random_pairs() {
        let mut rng = SeededRng::new(2024);
        let small: Vec<char> = vec!['A', 'N', 'O', 'F', '2', 'S'];
        let mut same = 0;
        for i in 0..500 {
            let (a, b) = if i % 2 == 0 {
                let item = gen_s2_item(rng.coin(), &mut rng).unwrap();
                (item.first, item.second)
            } else {
                (random_view(&mut rng, &small), random_view(&mut rng, &small))
            };
            let fast = cube_same(&a, &b);
            assert_eq!(fast, cube_same_exhaustive(&a, &b), "{a:?} vs {b:?}");
            assert_eq!(fast, cube_same(&b, &a));
            same += fast as usize;
        }
        assert!(same > 50 && same < 450);
    }

    #[test]
    fn generated_items_match_request() {
        for seed in 0..100 {
            let mut rng = SeededRng::new(seed);
            let want = seed % 2 == 0;
            let item = gen_s2_item(want, &mut rng).unwrap();
            assert_eq!(item.truth, want);
            assert!(item.verify());
        }
    }

    #[test]
    fn alphabet_classes_are_exclusive() {
        let a = alphabet();
        assert_eq!(a.len(), 18);
        assert!(a.iter().all(|c| symmetry(*c).is_some() && font::has_glyph(*c)));
        let set: BTreeSet<_> = a.iter().collect();
        assert_eq!(set.len(), 18);
    }
}
