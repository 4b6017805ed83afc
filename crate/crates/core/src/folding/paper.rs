//! Paper folding (VZ2): exact fold simulation, punching and unfolding.
//!
//! The sheet is the unit square in a y-up frame. A folded sheet is a stack
//! of convex layers; each layer remembers the affine map that carries its
//! current position back to the flat sheet, so a punch through the stack
//! lands on the flat sheet once per pierced layer.

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::seq::{IndexedRandom, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::difficulty::Difficulty;
use crate::error::{Error, Result};
use crate::geometry::exact::{area, clip_convex, locate, oriented, qi, Containment, Line};
use crate::geometry::{AxisKind, Color, FoldAxis, Point, Primitive, QPoint, Scene, Stroke, Q};
use crate::rng::SeededRng;

pub const MAX_ATTEMPTS: usize = 1000;
/// Fold offsets and punch positions live on these grids.
pub const FOLD_GRID: i64 = 4;
pub const PUNCH_GRID: i64 = 8;
pub const CANDIDATES: usize = 5;

/// `p -> m p + t` with exact coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Affine {
    pub m: [[Q; 2]; 2],
    pub t: QPoint,
}

impl Affine {
    pub fn identity() -> Self {
        Self { m: [[qi(1), qi(0)], [qi(0), qi(1)]], t: QPoint::int(0, 0) }
    }

    pub fn reflection(axis: &FoldAxis) -> Self {
        let o = axis.reflect_exact(QPoint::int(0, 0));
        let ex = axis.reflect_exact(QPoint::int(1, 0)).sub(o);
        let ey = axis.reflect_exact(QPoint::int(0, 1)).sub(o);
        Self { m: [[ex.x, ey.x], [ex.y, ey.y]], t: o }
    }

    pub fn apply(&self, p: QPoint) -> QPoint {
        QPoint::new(
            self.m[0][0] * p.x + self.m[0][1] * p.y + self.t.x,
            self.m[1][0] * p.x + self.m[1][1] * p.y + self.t.y,
        )
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Affine) -> Affine {
        let m = [0, 1].map(|i| [0, 1].map(|j| self.m[i][0] * other.m[0][j] + self.m[i][1] * other.m[1][j]));
        Affine { m, t: self.apply(other.t) }
    }

    pub fn inverse(&self) -> Affine {
        let [[a, b], [c, d]] = self.m;
        let det = a * d - b * c;
        let m = [[d / det, -b / det], [-c / det, a / det]];
        let lin = Affine { m, t: QPoint::int(0, 0) };
        Affine { m, t: lin.apply(self.t).neg() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layer {
    /// Convex, counter-clockwise, current coordinates.
    pub region: Vec<QPoint>,
    pub to_flat: Affine,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldStep {
    pub axis: FoldAxis,
    /// Sign of `axis.side_exact` on the half that stays put.
    pub stationary: i8,
    /// The axis clipped to the sheet just before this fold.
    pub creases: Vec<(QPoint, QPoint)>,
}

impl FoldStep {
    /// Where a point of the pre-fold sheet ends up after this fold.
    pub fn carry(&self, p: QPoint) -> QPoint {
        if Q::from_integer(self.stationary as i64) * self.axis.side_exact(p) < Q::zero() {
            self.axis.reflect_exact(p)
        } else {
            p
        }
    }
}

pub fn unit_square() -> Vec<QPoint> {
    vec![QPoint::int(0, 0), QPoint::int(1, 0), QPoint::int(1, 1), QPoint::int(0, 1)]
}

fn axis_line(axis: &FoldAxis, sign: i8) -> Line {
    let c = axis.side_exact(QPoint::int(0, 0));
    let a = axis.side_exact(QPoint::int(1, 0)) - c;
    let b = axis.side_exact(QPoint::int(0, 1)) - c;
    let k = Q::from_integer(sign as i64);
    Line { a: a * k, b: b * k, c: c * k }
}

fn chord(region: &[QPoint], axis: &FoldAxis) -> Option<(QPoint, QPoint)> {
    let n = region.len();
    let mut hits = Vec::new();
    for i in 0..n {
        let (p, q) = (region[i], region[(i + 1) % n]);
        let (sp, sq) = (axis.side_exact(p), axis.side_exact(q));
        if sp.is_zero() {
            hits.push(p);
        }
        if (sp > Q::zero() && sq < Q::zero()) || (sp < Q::zero() && sq > Q::zero()) {
            hits.push(p.add(q.sub(p).scale(sp / (sp - sq))));
        }
    }
    let lo = hits.iter().copied().min_by(|a, b| a.x.cmp(&b.x).then(a.y.cmp(&b.y)))?;
    let hi = hits.iter().copied().max_by(|a, b| a.x.cmp(&b.x).then(a.y.cmp(&b.y)))?;
    (lo != hi).then_some((lo, hi))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldState {
    /// Stacking order, bottom first.
    pub layers: Vec<Layer>,
    /// Holes on the flat sheet.
    pub holes: Vec<QPoint>,
    pub history: Vec<FoldStep>,
}

impl Default for FoldState {
    fn default() -> Self {
        Self::flat()
    }
}

impl FoldState {
    pub fn flat() -> Self {
        Self { layers: vec![Layer { region: unit_square(), to_flat: Affine::identity() }], holes: Vec::new(), history: Vec::new() }
    }

    pub fn with_holes(mut self, holes: Vec<QPoint>) -> Self {
        self.holes = holes;
        self
    }

    pub fn vertices(&self) -> Vec<QPoint> {
        self.layers.iter().flat_map(|l| l.region.iter().copied()).collect()
    }

    /// Centre of the bounding box of the current sheet.
    pub fn center(&self) -> QPoint {
        let v = self.vertices();
        let min_x = v.iter().map(|p| p.x).min().expect("sheet has vertices");
        let max_x = v.iter().map(|p| p.x).max().expect("sheet has vertices");
        let min_y = v.iter().map(|p| p.y).min().expect("sheet has vertices");
        let max_y = v.iter().map(|p| p.y).max().expect("sheet has vertices");
        QPoint::new((min_x + max_x) / qi(2), (min_y + max_y) / qi(2))
    }

    /// Sum of layer areas; one unit for the flat sheet whatever the folding.
    pub fn paper_area(&self) -> Q {
        self.layers.iter().map(|l| area(&l.region)).sum()
    }

    /// The half containing the sheet's centre stays; on a tie, the half
    /// holding the lowest-then-leftmost vertex off the axis.
    pub fn stationary_side(&self, axis: &FoldAxis) -> Option<i8> {
        let s = axis.side_exact(self.center());
        if !s.is_zero() {
            return Some(if s > Q::zero() { 1 } else { -1 });
        }
        let mut v = self.vertices();
        v.sort_by(|a, b| a.lex_cmp(b));
        v.into_iter().map(|p| axis.side_exact(p)).find(|s| !s.is_zero()).map(|s| if s > Q::zero() { 1 } else { -1 })
    }

    pub fn fold(&self, axis: FoldAxis) -> Result<FoldState> {
        let miss = || Error::param(format!("fold axis {:?} at {} misses the sheet", axis.kind, axis.offset));
        let sign = self.stationary_side(&axis).ok_or_else(miss)?;
        let keep = axis_line(&axis, sign);
        let mirror = Affine::reflection(&axis);
        let mut stay = Vec::new();
        let mut flap = Vec::new();
        for layer in &self.layers {
            let s = clip_convex(&layer.region, &keep);
            if s.len() >= 3 && !area(&s).is_zero() {
                stay.push(Layer { region: s, to_flat: layer.to_flat });
            }
            let m = clip_convex(&layer.region, &keep.flipped());
            if m.len() >= 3 && !area(&m).is_zero() {
                let region = oriented(m.iter().map(|p| axis.reflect_exact(*p)).collect());
                flap.push(Layer { region, to_flat: layer.to_flat.compose(&mirror) });
            }
        }
        if stay.is_empty() || flap.is_empty() {
            return Err(miss());
        }
        let mut creases: Vec<(QPoint, QPoint)> = self.layers.iter().filter_map(|l| chord(&l.region, &axis)).collect();
        creases.sort_by(|a, b| a.0.lex_cmp(&b.0).then(a.1.lex_cmp(&b.1)));
        creases.dedup();
        flap.reverse();
        stay.extend(flap);
        let mut history = self.history.clone();
        history.push(FoldStep { axis, stationary: sign, creases });
        Ok(FoldState { layers: stay, holes: self.holes.clone(), history })
    }

    pub fn replay(axes: &[FoldAxis]) -> Result<FoldState> {
        axes.iter().try_fold(FoldState::flat(), |s, a| s.fold(*a))
    }

    /// Undoes the most recent fold.
    pub fn unfold(&self) -> Result<FoldState> {
        let n = self.history.len();
        if n == 0 {
            return Ok(self.clone());
        }
        let axes: Vec<FoldAxis> = self.history[..n - 1].iter().map(|s| s.axis).collect();
        Ok(FoldState::replay(&axes)?.with_holes(self.holes.clone()))
    }

    /// Flat holes as they appear on the folded sheet (deduplicated).
    pub fn current_holes(&self) -> Vec<QPoint> {
        let mut out = BTreeSet::new();
        for layer in &self.layers {
            let back = layer.to_flat.inverse();
            for h in &self.holes {
                let q = back.apply(*h);
                if locate(q, &layer.region) != Containment::Outside {
                    out.insert((q.y, q.x));
                }
            }
        }
        out.into_iter().map(|(y, x)| QPoint::new(x, y)).collect()
    }

    /// Number of layers strictly containing `p`, or an error when `p` lies on
    /// a layer edge or off the sheet.
    pub fn layers_at(&self, p: QPoint) -> Result<usize> {
        let mut n = 0;
        for l in &self.layers {
            match locate(p, &l.region) {
                Containment::Inside => n += 1,
                Containment::Boundary => return Err(Error::param(format!("punch ({}, {}) lies on a crease or edge", p.x, p.y))),
                Containment::Outside => {}
            }
        }
        if n == 0 {
            return Err(Error::param(format!("punch ({}, {}) misses the sheet", p.x, p.y)));
        }
        Ok(n)
    }

    /// Punches every point through the whole stack and unfolds to the flat sheet.
    pub fn punch_and_unfold(&self, punches: &[QPoint]) -> Result<Vec<QPoint>> {
        let mut out = Vec::new();
        for &p in punches {
            self.layers_at(p)?;
            for l in &self.layers {
                if locate(p, &l.region) == Containment::Inside {
                    out.push(l.to_flat.apply(p));
                }
            }
        }
        Ok(out)
    }

    /// Carries a flat-sheet point through the recorded folds.
    pub fn refold(&self, flat: QPoint) -> QPoint {
        self.history.iter().fold(flat, |p, step| step.carry(p))
    }
}

fn axis_kinds() -> [AxisKind; 4] {
    [AxisKind::Vertical, AxisKind::Horizontal, AxisKind::DiagonalUp, AxisKind::DiagonalDown]
}

/// A random fold on the quarter grid that actually moves paper.
pub fn random_fold(state: &FoldState, rng: &mut SeededRng) -> Result<FoldState> {
    for _ in 0..MAX_ATTEMPTS {
        let kind = if rng.index(3) < 2 { axis_kinds()[rng.index(2)] } else { axis_kinds()[2 + rng.index(2)] };
        let k = match kind {
            AxisKind::Vertical | AxisKind::Horizontal => 1 + rng.index(FOLD_GRID as usize - 1) as i64,
            AxisKind::DiagonalUp => rng.index(2 * FOLD_GRID as usize - 1) as i64 - (FOLD_GRID - 1),
            AxisKind::DiagonalDown => 1 + rng.index(2 * FOLD_GRID as usize - 1) as i64,
        };
        let axis = FoldAxis::new(kind, Q::new(k, FOLD_GRID))?;
        if let Ok(next) = state.fold(axis) {
            return Ok(next);
        }
    }
    Err(Error::GenerationFailed { what: "fold axis", seed: rng.seed(), attempts: MAX_ATTEMPTS })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vz2Params {
    pub min_folds: usize,
    pub max_folds: usize,
    pub min_punches: usize,
    pub max_punches: usize,
}

impl Vz2Params {
    pub fn preset(d: Difficulty) -> Self {
        match d {
            Difficulty::Easy => Self { min_folds: 1, max_folds: 2, min_punches: 1, max_punches: 1 },
            Difficulty::Normal => Self { min_folds: 1, max_folds: 3, min_punches: 1, max_punches: 2 },
            Difficulty::Hard => Self { min_folds: 3, max_folds: 5, min_punches: 2, max_punches: 3 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Corruption {
    Displaced,
    Added,
    Dropped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub holes: Vec<QPoint>,
    pub corruption: Option<Corruption>,
}

impl Candidate {
    pub fn truth(&self) -> bool {
        self.corruption.is_none()
    }
}

/// Folds plus punches, with five unfolded candidates of which one is right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vz2Item {
    pub folds: Vec<FoldAxis>,
    pub punches: Vec<QPoint>,
    pub holes: Vec<QPoint>,
    pub candidates: Vec<Candidate>,
}

fn sorted(mut v: Vec<QPoint>) -> Vec<QPoint> {
    v.sort_by(|a, b| a.lex_cmp(b));
    v
}

fn same_set(a: &[QPoint], b: &[QPoint]) -> bool {
    sorted(a.to_vec()) == sorted(b.to_vec())
}

impl Vz2Item {
    pub fn truths(&self) -> Vec<bool> {
        self.candidates.iter().map(Candidate::truth).collect()
    }

    pub fn state(&self) -> Result<FoldState> {
        FoldState::replay(&self.folds)
    }

    pub fn verify(&self) -> bool {
        let Ok(state) = self.state() else { return false };
        let Ok(holes) = state.punch_and_unfold(&self.punches) else { return false };
        same_set(&holes, &self.holes)
            && self.truths().iter().filter(|t| **t).count() == 1
            && self.candidates.iter().all(|c| same_set(&c.holes, &holes) == c.truth())
    }

    /// Each step left to right: the sheet with the next crease dashed, and
    /// finally the folded sheet with its punches.
    pub fn sequence_scene(&self) -> Result<Scene> {
        const PANEL: f64 = 220.0;
        let mut states = vec![FoldState::flat()];
        for axis in &self.folds {
            let next = states.last().expect("starts with the flat sheet").fold(*axis)?;
            states.push(next);
        }
        let mut scene = Scene::new(PANEL * states.len() as f64, PANEL);
        for (i, state) in states.iter().enumerate() {
            let frame = Frame { x0: i as f64 * PANEL + 20.0, y0: 20.0, size: PANEL - 40.0 };
            for layer in &state.layers {
                let pts = layer.region.iter().map(|p| frame.at(*p)).collect();
                scene.push(0, Primitive::Polygon { points: pts, fill: Some(Color::WHITE), stroke: Some(Stroke::black(2.5)) });
            }
            if let Some(step) = states.get(i + 1).and_then(|s| s.history.last()) {
                for (a, b) in &step.creases {
                    dashed(&mut scene, frame.at(*a), frame.at(*b));
                }
            } else {
                for p in &self.punches {
                    scene.push(1, Primitive::Circle { center: frame.at(*p), radius: 6.0, fill: Some(Color::BLACK), stroke: None });
                }
            }
        }
        Ok(scene)
    }

    pub fn candidate_scene(&self, i: usize) -> Scene {
        let mut scene = Scene::new(240.0, 240.0);
        let frame = Frame { x0: 20.0, y0: 20.0, size: 200.0 };
        let pts = unit_square().iter().map(|p| frame.at(*p)).collect();
        scene.push(0, Primitive::Polygon { points: pts, fill: Some(Color::WHITE), stroke: Some(Stroke::black(2.5)) });
        for h in &self.candidates[i].holes {
            scene.push(1, Primitive::Circle { center: frame.at(*h), radius: 7.0, fill: None, stroke: Some(Stroke::black(2.5)) });
        }
        scene
    }
}

struct Frame {
    x0: f64,
    y0: f64,
    size: f64,
}

impl Frame {
    fn at(&self, p: QPoint) -> Point {
        let f = p.to_f64();
        Point::new(self.x0 + f.x * self.size, self.y0 + (1.0 - f.y) * self.size)
    }
}

fn dashed(scene: &mut Scene, a: Point, b: Point) {
    let len = a.dist(b);
    let n = ((len / 8.0).floor() as usize).max(1);
    for k in (0..n).step_by(2) {
        let s = a.add(b.sub(a).scale(k as f64 / n as f64));
        let e = a.add(b.sub(a).scale(((k + 1) as f64 / n as f64).min(1.0)));
        scene.push(2, Primitive::Line { from: s, to: e, stroke: Stroke::black(2.0) });
    }
}

fn grid_points() -> Vec<QPoint> {
    (1..PUNCH_GRID)
        .flat_map(|i| (1..PUNCH_GRID).map(move |j| QPoint::new(Q::new(i, PUNCH_GRID), Q::new(j, PUNCH_GRID))))
        .collect()
}

/// Applies one corruption to a hole set; `None` if it cannot apply.
pub fn corrupt(holes: &[QPoint], kind: Corruption, rng: &mut SeededRng) -> Option<Vec<QPoint>> {
    let taken: BTreeSet<(Q, Q)> = holes.iter().map(|p| (p.x, p.y)).collect();
    let free: Vec<QPoint> = grid_points().into_iter().filter(|p| !taken.contains(&(p.x, p.y))).collect();
    let mut out = holes.to_vec();
    match kind {
        Corruption::Displaced => {
            let &to = free.choose(rng)?;
            let i = rng.index(out.len().max(1));
            *out.get_mut(i)? = to;
        }
        Corruption::Added => out.push(*free.choose(rng)?),
        Corruption::Dropped => {
            if out.len() < 2 {
                return None;
            }
            out.remove(rng.index(out.len()));
        }
    }
    Some(sorted(out))
}

pub fn gen_vz2(params: &Vz2Params, rng: &mut SeededRng) -> Result<Vz2Item> {
    if params.min_folds == 0 || params.min_folds > params.max_folds || params.min_punches == 0 || params.min_punches > params.max_punches {
        return Err(Error::param(format!("invalid fold/punch ranges {params:?}")));
    }
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let folds_n = params.min_folds + rng.index(params.max_folds - params.min_folds + 1);
        let punches_n = params.min_punches + rng.index(params.max_punches - params.min_punches + 1);
        let mut state = FoldState::flat();
        for _ in 0..folds_n {
            state = random_fold(&state, rng)?;
        }
        let mut spots: Vec<QPoint> = grid_points().into_iter().filter(|p| state.layers_at(*p).is_ok()).collect();
        if spots.len() < punches_n {
            continue;
        }
        spots.shuffle(rng);
        let punches = sorted(spots[..punches_n].to_vec());
        let holes = sorted(state.punch_and_unfold(&punches)?);
        let answer = rng.index(CANDIDATES);
        let mut candidates: Vec<Candidate> = Vec::with_capacity(CANDIDATES);
        for i in 0..CANDIDATES {
            if i == answer {
                candidates.push(Candidate { holes: holes.clone(), corruption: None });
                continue;
            }
            let mut placed = false;
            for _ in 0..MAX_ATTEMPTS {
                let kind = match rng.index(4) {
                    0 | 1 => Corruption::Displaced,
                    2 => Corruption::Added,
                    _ => Corruption::Dropped,
                };
                let Some(c) = corrupt(&holes, kind, rng).or_else(|| corrupt(&holes, Corruption::Displaced, rng)) else { continue };
                let kind = if c.len() == holes.len() { Corruption::Displaced } else { kind };
                if !same_set(&c, &holes) && candidates.iter().all(|o| !same_set(&o.holes, &c)) {
                    candidates.push(Candidate { holes: c, corruption: Some(kind) });
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'attempt;
            }
        }
        let folds = state.history.iter().map(|s| s.axis).collect();
        return Ok(Vz2Item { folds, punches, holes, candidates });
    }
    Err(Error::GenerationFailed { what: "paper folding", seed: rng.seed(), attempts: MAX_ATTEMPTS })
}

/// Walks the folds backwards, duplicating a point across the axis when
/// the mirrored position was paper before the fold. An independent
/// reference for the holes [`FoldState::punch_and_unfold`] produces.
pub fn back_propagate(axes: &[FoldAxis], punch: QPoint) -> Result<Vec<QPoint>> {
    let mut states = vec![FoldState::flat()];
    for a in axes {
        let next = states.last().expect("non-empty").fold(*a)?;
        states.push(next);
    }
    let mut pts = vec![punch];
    for (i, axis) in axes.iter().enumerate().rev() {
        let before = &states[i];
        let on_paper = |p: QPoint| before.layers.iter().any(|l| locate(p, &l.region) == Containment::Inside);
        let mut next = Vec::new();
        for p in pts {
            if on_paper(p) {
                next.push(p);
            }
            let r = axis.reflect_exact(p);
            if r != p && on_paper(r) {
                next.push(r);
            }
        }
        pts = next;
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::exact::lex_min;
    use num_traits::Signed;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn pt(x: Q, y: Q) -> QPoint {
        QPoint::new(x, y)
    }

    #[test]
    fn affine_roundtrip() {
        let a = Affine::reflection(&FoldAxis::diagonal(-1, q(1, 1)).unwrap());
        let b = Affine::reflection(&FoldAxis::vertical(q(1, 4)).unwrap());
        let c = a.compose(&b);
        let p = pt(q(1, 3), q(2, 7));
        assert_eq!(c.inverse().apply(c.apply(p)), p);
        assert_eq!(a.compose(&a), Affine::identity());
    }

    #[test]
    fn vertical_fold_moves_existing_hole() {
        let s = FoldState::flat().with_holes(vec![pt(q(3, 4), q(1, 2))]);
        let f = s.fold(FoldAxis::vertical(q(1, 2)).unwrap()).unwrap();
        assert_eq!(f.current_holes(), vec![pt(q(1, 4), q(1, 2))]);
        assert_eq!(f.history[0].creases, vec![(pt(q(1, 2), q(0, 1)), pt(q(1, 2), q(1, 1)))]);
        let back = f.unfold().unwrap();
        assert_eq!(back.layers, FoldState::flat().layers);
        assert_eq!(back.current_holes(), vec![pt(q(3, 4), q(1, 2))]);
    }

    #[test]
    fn diagonal_fold_leaves_triangle() {
        let f = FoldState::flat().fold(FoldAxis::diagonal(1, q(0, 1)).unwrap()).unwrap();
        assert_eq!(f.layers.len(), 2);
        let mut tri: Vec<QPoint> = f.layers[0].region.clone();
        tri.sort_by(|a, b| a.lex_cmp(b));
        assert_eq!(tri, vec![QPoint::int(0, 0), QPoint::int(1, 0), QPoint::int(1, 1)]);
        assert_eq!(f.layers[1].region.len(), 3);
        assert_eq!(f.paper_area(), qi(1));
    }

    #[test]
    fn off_centre_fold_keeps_larger_side() {
        let f = FoldState::flat().fold(FoldAxis::vertical(q(1, 4)).unwrap()).unwrap();
        assert_eq!(f.history[0].stationary, 1);
        let xs: BTreeSet<Q> = f.vertices().iter().map(|p| p.x).collect();
        assert_eq!(xs, BTreeSet::from([q(1, 4), q(1, 2), qi(1)]));
    }

    #[test]
    fn axis_outside_sheet_is_rejected() {
        let f = FoldState::flat().fold(FoldAxis::vertical(q(1, 2)).unwrap()).unwrap();
        assert!(matches!(f.fold(FoldAxis::vertical(q(3, 4)).unwrap()), Err(Error::Parameter(_))));
        assert!(FoldState::flat().fold(FoldAxis::vertical(qi(0)).unwrap()).is_err());
    }

    #[test]
    fn zero_and_one_fold_punches() {
        let flat = FoldState::flat();
        let p = pt(q(3, 8), q(5, 8));
        assert_eq!(flat.punch_and_unfold(&[p]).unwrap(), vec![p]);
        let axis = FoldAxis::horizontal(q(1, 2)).unwrap();
        let once = flat.fold(axis).unwrap();
        let p = pt(q(3, 8), q(1, 4));
        let holes = once.punch_and_unfold(&[p]).unwrap();
        assert_eq!(holes.len(), 2);
        assert_eq!(axis.reflect_exact(holes[0]), holes[1]);
    }

    #[test]
    fn punches_on_crease_or_off_sheet_are_errors() {
        let once = FoldState::flat().fold(FoldAxis::vertical(q(1, 2)).unwrap()).unwrap();
        assert!(once.punch_and_unfold(&[pt(q(1, 2), q(1, 2))]).is_err());
        assert!(once.punch_and_unfold(&[pt(q(7, 8), q(1, 2))]).is_err());
    }

    #[test]
    fn refold_roundtrip_and_layer_counts() {
        for seed in 0..200 {
            let mut rng = SeededRng::new(seed);
            let folds = 1 + seed as usize % 5;
            let params = Vz2Params { min_folds: folds, max_folds: folds, min_punches: 1, max_punches: 3 };
            let item = gen_vz2(&params, &mut rng).unwrap();
            let state = item.state().unwrap();
            assert_eq!(state.paper_area(), qi(1));
            let mut expected = Vec::new();
            for p in &item.punches {
                let layers = state.layers_at(*p).unwrap();
                let mut back = back_propagate(&item.folds, *p).unwrap();
                assert_eq!(back.len(), layers, "seed {seed}");
                expected.append(&mut back);
            }
            assert!(same_set(&expected, &item.holes), "seed {seed}");
            let mut refolded: Vec<QPoint> = item.holes.iter().map(|h| state.refold(*h)).collect();
            refolded.sort_by(|a, b| a.lex_cmp(b));
            let mut with_mult: Vec<QPoint> =
                item.punches.iter().flat_map(|p| std::iter::repeat_n(*p, state.layers_at(*p).unwrap())).collect();
            with_mult.sort_by(|a, b| a.lex_cmp(b));
            assert_eq!(refolded, with_mult, "seed {seed}");
        }
    }

    #[test]
    fn items_verify_and_flag_corruptions() {
        for seed in 0..100 {
            let d = Difficulty::ALL[seed as usize % 3];
            let item = gen_vz2(&Vz2Params::preset(d), &mut SeededRng::new(seed)).unwrap();
            assert!(item.verify(), "seed {seed}");
            assert_eq!(item.candidates.len(), CANDIDATES);
            for c in &item.candidates {
                assert_eq!(same_set(&c.holes, &item.holes), c.truth());
            }
            let folds = item.folds.len();
            let p = Vz2Params::preset(d);
            assert!((p.min_folds..=p.max_folds).contains(&folds));
        }
    }

    #[test]
    fn lex_min_tiebreak_is_deterministic() {
        let s = FoldState::flat();
        let axis = FoldAxis::diagonal(-1, qi(1)).unwrap();
        assert_eq!(s.stationary_side(&axis), Some(-1));
        assert_eq!(lex_min(&s.vertices()), Some(QPoint::int(0, 0)));
        assert!(axis.side_exact(QPoint::int(0, 0)).is_negative());
    }
}
