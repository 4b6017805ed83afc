//! Form-board dissections (VZ1).
//!
//! A convex lattice target is bisected by slope-limited cuts until `k`
//! solution fragments exist; distractors are halves of re-cut solution
//! fragments. Areas are exact, so the subset-sum scan is decisive.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use rand::seq::{IndexedRandom, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::difficulty::Difficulty;
use crate::error::{Error, Result};
use crate::geometry::exact::{area, clip_convex, convex_overlap_area, lex_min, locate, oriented, translate, Containment, Line};
use crate::geometry::{Color, Point, Primitive, QPoint, Scene, Stroke, Q};
use crate::rng::SeededRng;

pub const PIECES: usize = 5;
pub const MAX_ATTEMPTS: usize = 1000;
const UNIT_PX: f64 = 50.0;

/// Cut directions as integer vectors: slopes 0, vertical, +-1, +-2, +-3.
pub const ALL_DIRECTIONS: [(i64, i64); 8] = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (1, -2), (1, 3), (1, -3)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vz1Params {
    pub grid: i64,
    pub directions: Vec<(i64, i64)>,
    pub min_piece_area: Q,
}

impl Vz1Params {
    pub fn preset(d: Difficulty) -> Self {
        let (grid, dirs) = match d {
            Difficulty::Easy => (3, &ALL_DIRECTIONS[..4]),
            Difficulty::Normal => (4, &ALL_DIRECTIONS[..]),
            Difficulty::Hard => (5, &ALL_DIRECTIONS[..]),
        };
        Self { grid, directions: dirs.to_vec(), min_piece_area: Q::new(1, 2) }
    }
}

/// `rotate(piece, rotation) + offset` lands the piece on the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub piece: usize,
    pub rotation: u8,
    pub offset: QPoint,
}

pub fn rotate(poly: &[QPoint], quarter_turns: u8) -> Vec<QPoint> {
    poly.iter().map(|p| p.rot90_times(quarter_turns)).collect()
}

pub fn place(poly: &[QPoint], p: &Placement) -> Vec<QPoint> {
    translate(&rotate(poly, p.rotation), p.offset)
}

/// Moves the bounding-box corner to the origin.
pub fn normalize(poly: &[QPoint]) -> Vec<QPoint> {
    let min_x = poly.iter().map(|p| p.x).min().unwrap_or_else(Q::zero);
    let min_y = poly.iter().map(|p| p.y).min().unwrap_or_else(Q::zero);
    translate(poly, QPoint::new(-min_x, -min_y))
}

fn l1(d: QPoint) -> QPoint {
    let n = d.x.abs() + d.y.abs();
    QPoint::new(d.x / n, d.y / n)
}

fn angle(d: QPoint) -> f64 {
    let f = d.to_f64();
    f.y.atan2(f.x).rem_euclid(std::f64::consts::TAU)
}

fn edges(poly: &[QPoint]) -> impl Iterator<Item = (QPoint, QPoint)> + '_ {
    (0..poly.len()).map(move |i| (poly[i], poly[(i + 1) % poly.len()]))
}

/// Points just off `p` inside each angular gap between edges meeting at `p`.
fn probes(p: QPoint, polys: &[&[QPoint]]) -> Vec<QPoint> {
    let mut dirs: Vec<QPoint> = Vec::new();
    for poly in polys {
        for (a, b) in edges(poly) {
            let through = !b.sub(a).cross(p.sub(a)).is_zero();
            if through {
                continue;
            }
            let inside = |t: QPoint| t.sub(a).dot(b.sub(a)) > Q::zero() && t.sub(b).dot(a.sub(b)) > Q::zero();
            if a == p {
                dirs.push(l1(b.sub(a)));
            } else if b == p {
                dirs.push(l1(a.sub(b)));
            } else if inside(p) {
                dirs.push(l1(b.sub(a)));
                dirs.push(l1(a.sub(b)));
            }
        }
    }
    dirs.sort_by(|a, b| angle(*a).partial_cmp(&angle(*b)).unwrap_or(Ordering::Equal));
    dirs.dedup();
    let eps = Q::new(1, 100_000);
    let n = dirs.len();
    (0..n)
        .map(|i| {
            let (d1, d2) = (dirs[i], dirs[(i + 1) % n]);
            let c = d1.cross(d2);
            let bis = if n == 1 {
                d1.neg()
            } else if c > Q::zero() {
                d1.add(d2)
            } else if c < Q::zero() {
                d1.add(d2).neg()
            } else if d1.dot(d2) < Q::zero() {
                d1.rot90()
            } else {
                d1.neg()
            };
            p.add(bis.scale(eps))
        })
        .collect()
}

struct Search<'a> {
    pieces: Vec<Vec<QPoint>>,
    target: &'a [QPoint],
}

impl Search<'_> {
    fn uncovered(&self, q: QPoint, placed: &[(Placement, Vec<QPoint>)]) -> bool {
        locate(q, self.target) == Containment::Inside && placed.iter().all(|(_, poly)| locate(q, poly) == Containment::Outside)
    }

    /// The new piece must fill some still-open sector at `corner`.
    fn claims_corner(&self, corner: QPoint, poly: &[QPoint], polys: &[&[QPoint]], placed: &[(Placement, Vec<QPoint>)]) -> bool {
        let mut all = polys.to_vec();
        all.push(poly);
        probes(corner, &all)
            .into_iter()
            .any(|q| locate(q, poly) == Containment::Inside && self.uncovered(q, placed))
    }

    fn run(&self, placed: &mut Vec<(Placement, Vec<QPoint>)>, used: &mut Vec<bool>) -> bool {
        if used.iter().all(|u| *u) {
            return true;
        }
        let mut points: Vec<QPoint> =
            self.target.iter().copied().chain(placed.iter().flat_map(|(_, p)| p.iter().copied())).collect();
        points.sort_by(|a, b| a.lex_cmp(b));
        points.dedup();
        let owned: Vec<Vec<QPoint>> = placed.iter().map(|(_, p)| p.clone()).collect();
        let mut polys: Vec<&[QPoint]> = vec![self.target];
        polys.extend(owned.iter().map(Vec::as_slice));
        let Some(corner) = points.iter().copied().find(|&p| probes(p, &polys).into_iter().any(|q| self.uncovered(q, placed)))
        else {
            return false;
        };
        for i in 0..self.pieces.len() {
            if used[i] {
                continue;
            }
            for r in 0..4u8 {
                let turned = rotate(&self.pieces[i], r);
                let low = lex_min(&turned).expect("pieces have vertices");
                let placement = Placement { piece: i, rotation: r, offset: corner.sub(low) };
                let poly = translate(&turned, placement.offset);
                let fits = poly.iter().all(|v| locate(*v, self.target) != Containment::Outside)
                    && self.claims_corner(corner, &poly, &polys, placed)
                    && placed.iter().all(|(_, other)| convex_overlap_area(&poly, other).is_zero());
                if !fits {
                    continue;
                }
                used[i] = true;
                placed.push((placement, poly));
                if self.run(placed, used) {
                    return true;
                }
                placed.pop();
                used[i] = false;
            }
        }
        false
    }
}

/// Exact cover of a convex `target` by all `pieces` using translations and
/// quarter-turn rotations only. Returns one placement per piece on success.
pub fn verify_tiling(pieces: &[Vec<QPoint>], target: &[QPoint]) -> Option<Vec<Placement>> {
    let total: Q = pieces.iter().map(|p| area(p)).sum();
    if pieces.is_empty() || total != area(target) {
        return None;
    }
    let search = Search { pieces: pieces.iter().map(|p| oriented(p.clone())).collect(), target };
    let target = oriented(target.to_vec());
    let search = Search { target: &target, ..search };
    let mut placed = Vec::new();
    let mut used = vec![false; pieces.len()];
    search.run(&mut placed, &mut used).then(|| {
        let mut out: Vec<Placement> = placed.into_iter().map(|(p, _)| p).collect();
        out.sort_by_key(|p| p.piece);
        out
    })
}

fn random_target(n: i64, rng: &mut SeededRng) -> Vec<QPoint> {
    let w = n;
    let h = if rng.coin() { n } else { n - 1 };
    // Corner, incoming edge direction, outgoing edge direction.
    let corners = [(0, 0, 0, -1, 1, 0), (w, 0, 1, 0, 0, 1), (w, h, 0, 1, -1, 0), (0, h, -1, 0, 0, -1)];
    let mut out = Vec::new();
    for (x, y, ix, iy, ox, oy) in corners {
        if rng.index(3) == 0 {
            out.push(QPoint::int(x - ix, y - iy));
            out.push(QPoint::int(x + ox, y + oy));
        } else {
            out.push(QPoint::int(x, y));
        }
    }
    oriented(out)
}

fn try_cut(poly: &[QPoint], params: &Vz1Params, rng: &mut SeededRng) -> Option<(Vec<QPoint>, Vec<QPoint>)> {
    let lo_x = poly.iter().map(|p| p.x.floor().to_integer()).min()?;
    let hi_x = poly.iter().map(|p| p.x.ceil().to_integer()).max()?;
    let lo_y = poly.iter().map(|p| p.y.floor().to_integer()).min()?;
    let hi_y = poly.iter().map(|p| p.y.ceil().to_integer()).max()?;
    let (dx, dy) = *params.directions.choose(rng)?;
    let x = lo_x + rng.index((hi_x - lo_x + 1) as usize) as i64;
    let y = lo_y + rng.index((hi_y - lo_y + 1) as usize) as i64;
    let a = QPoint::int(x, y);
    let line = Line::through(a, QPoint::int(x + dx, y + dy));
    let left = clip_convex(poly, &line);
    let right = clip_convex(poly, &line.flipped());
    let big = |p: &Vec<QPoint>| p.len() >= 3 && area(p) >= params.min_piece_area;
    (big(&left) && big(&right)).then(|| (oriented(left), oriented(right)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vz1Item {
    pub target: Vec<QPoint>,
    /// Pieces as shown: rotated and moved to the origin.
    pub pieces: Vec<Vec<QPoint>>,
    pub solution: Vec<usize>,
    pub placements: Vec<Placement>,
}

impl Vz1Item {
    pub fn truths(&self) -> Vec<bool> {
        (0..self.pieces.len()).map(|i| self.solution.contains(&i)).collect()
    }

    pub fn areas(&self) -> Vec<Q> {
        self.pieces.iter().map(|p| area(p)).collect()
    }

    /// Subsets (as bitmasks) whose area sum equals the target.
    pub fn matching_subsets(&self) -> Vec<u32> {
        let areas = self.areas();
        let goal = area(&self.target);
        (1u32..1 << areas.len())
            .filter(|m| (0..areas.len()).filter(|i| m >> i & 1 == 1).map(|i| areas[i]).sum::<Q>() == goal)
            .collect()
    }

    pub fn solution_mask(&self) -> u32 {
        self.solution.iter().map(|i| 1u32 << i).sum()
    }

    pub fn verify(&self) -> bool {
        let areas = self.areas();
        let distinct = (0..areas.len()).all(|i| (i + 1..areas.len()).all(|j| areas[i] != areas[j]));
        let chosen: Vec<Vec<QPoint>> = self.solution.iter().map(|&i| self.pieces[i].clone()).collect();
        self.pieces.len() == PIECES
            && distinct
            && self.matching_subsets() == vec![self.solution_mask()]
            && verify_tiling(&chosen, &self.target).is_some()
    }

    fn frame(&self) -> (f64, f64) {
        let w = self.target.iter().map(|p| p.to_f64().x).fold(0.0, f64::max);
        let h = self.target.iter().map(|p| p.to_f64().y).fold(0.0, f64::max);
        (w, h)
    }

    fn poly_scene(poly: &[QPoint], extent: f64, fill: Color) -> Scene {
        let size = (extent + 1.0) * UNIT_PX;
        let mut s = Scene::new(size, size);
        let pts = poly.iter().map(|p| {
            let f = p.to_f64();
            Point::new(UNIT_PX / 2.0 + f.x * UNIT_PX, size - UNIT_PX / 2.0 - f.y * UNIT_PX)
        });
        s.push(0, Primitive::Polygon { points: pts.collect(), fill: Some(fill), stroke: Some(Stroke::black(3.0)) });
        s
    }

    pub fn target_scene(&self) -> Scene {
        let (w, h) = self.frame();
        Self::poly_scene(&self.target, w.max(h), Color::WHITE)
    }

    pub fn piece_scene(&self, i: usize) -> Scene {
        let (w, h) = self.frame();
        Self::poly_scene(&self.pieces[i], w.max(h), Color::LIGHT)
    }
}

pub fn gen_vz1(params: &Vz1Params, rng: &mut SeededRng) -> Result<Vz1Item> {
    if params.grid < 2 || params.directions.is_empty() || !params.min_piece_area.is_positive() {
        return Err(Error::param(format!("invalid form-board parameters {params:?}")));
    }
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let target = random_target(params.grid, rng);
        let k = 3 + rng.index(3);
        let mut fragments = vec![target.clone()];
        while fragments.len() < k {
            let i = (0..fragments.len())
                .max_by(|&a, &b| area(&fragments[a]).cmp(&area(&fragments[b])).then(b.cmp(&a)))
                .expect("at least one fragment");
            let Some((a, b)) = (0..MAX_ATTEMPTS).find_map(|_| try_cut(&fragments[i], params, rng)) else {
                continue 'attempt;
            };
            fragments[i] = a;
            fragments.push(b);
        }
        let mut pieces = fragments.clone();
        while pieces.len() < PIECES {
            let found = (0..MAX_ATTEMPTS).find_map(|_| {
                let src = &fragments[rng.index(k)];
                let (a, b) = try_cut(src, params, rng)?;
                let half = if rng.coin() { a } else { b };
                let ar = area(&half);
                pieces.iter().all(|p| area(p) != ar).then_some(half)
            });
            match found {
                Some(h) => pieces.push(h),
                None => continue 'attempt,
            }
        }
        let areas: Vec<Q> = pieces.iter().map(|p| area(p)).collect();
        if (0..PIECES).any(|i| (i + 1..PIECES).any(|j| areas[i] == areas[j])) {
            continue;
        }
        let mut order: Vec<usize> = (0..PIECES).collect();
        order.shuffle(rng);
        let mut shown = vec![Vec::new(); PIECES];
        let mut placements = Vec::new();
        for (slot, &src) in order.iter().enumerate() {
            let r = rng.index(4) as u8;
            let turned = rotate(&pieces[src], r);
            let min_x = turned.iter().map(|p| p.x).min().expect("vertices");
            let min_y = turned.iter().map(|p| p.y).min().expect("vertices");
            shown[slot] = normalize(&turned);
            if src < k {
                let back = (4 - r) % 4;
                let offset = QPoint::new(min_x, min_y).rot90_times(back);
                placements.push(Placement { piece: slot, rotation: back, offset });
            }
        }
        placements.sort_by_key(|p| p.piece);
        let solution: Vec<usize> = placements.iter().map(|p| p.piece).collect();
        let item = Vz1Item { target, pieces: shown, solution, placements };
        if item.matching_subsets() != vec![item.solution_mask()] {
            continue;
        }
        return Ok(item);
    }
    Err(Error::GenerationFailed { what: "form board", seed: rng.seed(), attempts: MAX_ATTEMPTS })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(n: i64) -> Vec<QPoint> {
        vec![QPoint::int(0, 0), QPoint::int(n, 0), QPoint::int(n, n), QPoint::int(0, n)]
    }

    /// Samples the centres of a fine grid inside every 1/6 subcell and
    /// requires each sample to be covered by exactly one placed piece
    /// (boundary samples may touch several).
    fn raster_cover(placed: &[Vec<QPoint>], target: &[QPoint]) -> bool {
        let n = 6 * 3;
        let w = target.iter().map(|p| p.x.ceil().to_integer()).max().unwrap();
        let h = target.iter().map(|p| p.y.ceil().to_integer()).max().unwrap();
        for i in 0..w * n {
            for j in 0..h * n {
                let q = QPoint::new(Q::new(2 * i + 1, 2 * n), Q::new(2 * j + 1, 2 * n));
                let in_target = locate(q, target);
                let inside = placed.iter().filter(|p| locate(q, p) == Containment::Inside).count();
                let edge = placed.iter().filter(|p| locate(q, p) == Containment::Boundary).count();
                match in_target {
                    Containment::Inside if inside == 1 && edge == 0 => {}
                    Containment::Inside if inside == 0 && edge >= 1 => {}
                    Containment::Outside if inside == 0 => {}
                    Containment::Boundary if inside == 0 => {}
                    _ => return false,
                }
            }
        }
        true
    }

    #[test]
    fn probes_find_open_sector() {
        let t = square(2);
        let ps = probes(QPoint::int(0, 0), &[&t]);
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.iter().filter(|q| locate(**q, &t) == Containment::Inside).count(), 1);
    }

    #[test]
    fn square_from_two_rectangles() {
        let a = vec![QPoint::int(0, 0), QPoint::int(2, 0), QPoint::int(2, 1), QPoint::int(0, 1)];
        let b = vec![QPoint::int(0, 0), QPoint::int(1, 0), QPoint::int(1, 2), QPoint::int(0, 2)];
        let placement = verify_tiling(&[a.clone(), b], &square(2)).unwrap();
        assert_eq!(placement.len(), 2);
        assert!(verify_tiling(&[a], &square(2)).is_none());
    }

    #[test]
    fn flips_are_not_allowed() {
        let t1 = vec![QPoint::int(0, 0), QPoint::int(2, 0), QPoint::int(0, 2)];
        let t2 = t1.clone();
        assert!(verify_tiling(&[t1, t2], &square(2)).is_some());
        let skew = vec![QPoint::int(0, 0), QPoint::int(2, 0), QPoint::int(3, 1), QPoint::int(1, 1)];
        let mirrored = vec![QPoint::int(1, 0), QPoint::int(3, 0), QPoint::int(2, 1), QPoint::int(0, 1)];
        let turned = normalize(&rotate(&skew, 1));
        assert!(verify_tiling(&[turned], &skew).is_some());
        assert!(verify_tiling(&[mirrored], &skew).is_none());
    }

    #[test]
    fn generated_boards_are_valid() {
        for seed in 0..60 {
            let d = Difficulty::ALL[seed as usize % 3];
            let item = gen_vz1(&Vz1Params::preset(d), &mut SeededRng::new(seed)).unwrap();
            assert!(item.verify(), "seed {seed}");
            assert!((3..=5).contains(&item.solution.len()));
            let placed: Vec<Vec<QPoint>> = item.placements.iter().map(|p| place(&item.pieces[p.piece], p)).collect();
            let total: Q = placed.iter().map(|p| area(p)).sum();
            assert_eq!(total, area(&item.target));
            assert!(raster_cover(&placed, &item.target), "seed {seed}");
        }
    }

    #[test]
    fn search_agrees_with_raster_cover() {
        for seed in 0..50 {
            let item = gen_vz1(&Vz1Params::preset(Difficulty::Normal), &mut SeededRng::new(1000 + seed)).unwrap();
            let chosen: Vec<Vec<QPoint>> = item.solution.iter().map(|&i| item.pieces[i].clone()).collect();
            let found = verify_tiling(&chosen, &item.target).unwrap();
            let placed: Vec<Vec<QPoint>> = found.iter().map(|p| place(&chosen[p.piece], p)).collect();
            assert!(raster_cover(&placed, &item.target), "seed {seed}");
            let fewer = &chosen[1..];
            assert!(verify_tiling(fewer, &item.target).is_none());
            let partial: Vec<Vec<QPoint>> = item.placements[1..].iter().map(|p| place(&item.pieces[p.piece], p)).collect();
            assert!(!raster_cover(&partial, &item.target));
        }
    }

    #[test]
    fn piece_areas_distinct_and_unique_subset() {
        for seed in 0..100 {
            let item = gen_vz1(&Vz1Params::preset(Difficulty::Hard), &mut SeededRng::new(seed)).unwrap();
            let a = item.areas();
            for i in 0..PIECES {
                for j in i + 1..PIECES {
                    assert_ne!(a[i], a[j]);
                }
            }
            assert_eq!(item.matching_subsets(), vec![item.solution_mask()]);
        }
    }
}
