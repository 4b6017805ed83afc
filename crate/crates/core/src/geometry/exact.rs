//! Exact rational plane geometry for dissection and folding.

use std::cmp::Ordering;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::geometry::plane::{q_to_f64, FoldAxis, Point};

pub type Q = Ratio<i64>;

pub fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QPoint {
    pub x: Q,
    pub y: Q,
}

impl QPoint {
    pub const fn new(x: Q, y: Q) -> Self {
        Self { x, y }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Self::new(qi(x), qi(y))
    }

    pub fn add(self, o: QPoint) -> QPoint {
        QPoint::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: QPoint) -> QPoint {
        QPoint::new(self.x - o.x, self.y - o.y)
    }

    pub fn neg(self) -> QPoint {
        QPoint::new(-self.x, -self.y)
    }

    pub fn cross(self, o: QPoint) -> Q {
        self.x * o.y - self.y * o.x
    }

    pub fn dot(self, o: QPoint) -> Q {
        self.x * o.x + self.y * o.y
    }

    pub fn scale(self, k: Q) -> QPoint {
        QPoint::new(self.x * k, self.y * k)
    }

    /// Quarter turn `(x, y) -> (-y, x)` about the origin.
    pub fn rot90(self) -> QPoint {
        QPoint::new(-self.y, self.x)
    }

    pub fn rot90_times(self, k: u8) -> QPoint {
        (0..k % 4).fold(self, |p, _| p.rot90())
    }

    pub fn to_f64(self) -> Point {
        Point::new(q_to_f64(self.x), q_to_f64(self.y))
    }

    /// Order by `y`, then `x`: the lowest-then-leftmost point is the minimum.
    pub fn lex_cmp(&self, o: &QPoint) -> Ordering {
        self.y.cmp(&o.y).then(self.x.cmp(&o.x))
    }
}

/// Line `a*x + b*y + c = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Line {
    pub a: Q,
    pub b: Q,
    pub c: Q,
}

impl Line {
    pub fn through(p: QPoint, q: QPoint) -> Line {
        let d = q.sub(p);
        // Normal (-dy, dx): positive side is to the left of p -> q.
        let a = -d.y;
        let b = d.x;
        Line { a, b, c: -(a * p.x + b * p.y) }
    }

    pub fn from_axis(axis: &FoldAxis) -> Line {
        let (p, q) = axis.anchor_points();
        Line::through(p, q)
    }

    pub fn side(&self, p: QPoint) -> Q {
        self.a * p.x + self.b * p.y + self.c
    }

    pub fn flipped(&self) -> Line {
        Line { a: -self.a, b: -self.b, c: -self.c }
    }
}

fn intersect_on(line: &Line, p: QPoint, q: QPoint) -> QPoint {
    let sp = line.side(p);
    let sq = line.side(q);
    let t = sp / (sp - sq);
    p.add(q.sub(p).scale(t))
}

/// Twice the signed area (positive for counter-clockwise in a y-up frame).
pub fn area2(poly: &[QPoint]) -> Q {
    let n = poly.len();
    let mut s = Q::zero();
    for i in 0..n {
        s += poly[i].cross(poly[(i + 1) % n]);
    }
    s
}

pub fn area(poly: &[QPoint]) -> Q {
    area2(poly).abs() / qi(2)
}

/// Returns the polygon in positive orientation.
pub fn oriented(mut poly: Vec<QPoint>) -> Vec<QPoint> {
    if area2(&poly) < Q::zero() {
        poly.reverse();
    }
    poly
}

/// Drops repeated and collinear vertices.
pub fn simplify(poly: &[QPoint]) -> Vec<QPoint> {
    let mut pts: Vec<QPoint> = Vec::with_capacity(poly.len());
    for &p in poly {
        if pts.last() != Some(&p) {
            pts.push(p);
        }
    }
    while pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    let mut changed = true;
    while changed && pts.len() >= 3 {
        changed = false;
        let n = pts.len();
        for i in 0..n {
            let prev = pts[(i + n - 1) % n];
            let next = pts[(i + 1) % n];
            if next.sub(prev).cross(pts[i].sub(prev)).is_zero() {
                pts.remove(i);
                changed = true;
                break;
            }
        }
    }
    pts
}

/// Keeps the part of a convex polygon where `line.side >= 0`.
pub fn clip_convex(poly: &[QPoint], line: &Line) -> Vec<QPoint> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let sp = line.side(p);
        let sq = line.side(q);
        if sp >= Q::zero() {
            out.push(p);
        }
        if (sp > Q::zero() && sq < Q::zero()) || (sp < Q::zero() && sq > Q::zero()) {
            out.push(intersect_on(line, p, q));
        }
    }
    simplify(&out)
}

/// Edge half-planes of a positively oriented convex polygon (inside is positive).
pub fn edge_lines(poly: &[QPoint]) -> Vec<Line> {
    let n = poly.len();
    (0..n).map(|i| Line::through(poly[i], poly[(i + 1) % n])).collect()
}

/// Intersection of two positively oriented convex polygons.
pub fn convex_intersection(a: &[QPoint], b: &[QPoint]) -> Vec<QPoint> {
    let mut cur = a.to_vec();
    for line in edge_lines(b) {
        if cur.len() < 3 {
            return Vec::new();
        }
        cur = clip_convex(&cur, &line);
    }
    if cur.len() < 3 {
        Vec::new()
    } else {
        cur
    }
}

pub fn convex_overlap_area(a: &[QPoint], b: &[QPoint]) -> Q {
    let i = convex_intersection(a, b);
    if i.len() < 3 {
        Q::zero()
    } else {
        area(&i)
    }
}

/// `a \ b` for convex polygons as disjoint convex pieces of positive area.
pub fn convex_difference(a: &[QPoint], b: &[QPoint]) -> Vec<Vec<QPoint>> {
    let mut pieces = Vec::new();
    let mut cur = a.to_vec();
    for line in edge_lines(b) {
        if cur.len() < 3 {
            break;
        }
        let outside = clip_convex(&cur, &line.flipped());
        if outside.len() >= 3 && !area2(&outside).is_zero() {
            pieces.push(outside);
        }
        cur = clip_convex(&cur, &line);
    }
    pieces
}

/// Ear-clipping triangulation of a simple polygon.
pub fn triangulate(poly: &[QPoint]) -> Vec<[QPoint; 3]> {
    let mut pts = oriented(simplify(poly));
    let mut tris = Vec::new();
    let mut guard = 0;
    while pts.len() > 3 && guard < 10_000 {
        guard += 1;
        let n = pts.len();
        let mut clipped = false;
        for i in 0..n {
            let a = pts[(i + n - 1) % n];
            let b = pts[i];
            let c = pts[(i + 1) % n];
            if b.sub(a).cross(c.sub(b)) <= Q::zero() {
                continue;
            }
            let tri = [a, b, c];
            let blocked = pts.iter().enumerate().any(|(j, &p)| {
                j != i && j != (i + n - 1) % n && j != (i + 1) % n && point_in_convex_closed(p, &tri)
            });
            if !blocked {
                tris.push(tri);
                pts.remove(i);
                clipped = true;
                break;
            }
        }
        if !clipped {
            break;
        }
    }
    if pts.len() == 3 {
        tris.push([pts[0], pts[1], pts[2]]);
    }
    tris
}

fn point_in_convex_closed(p: QPoint, poly: &[QPoint]) -> bool {
    edge_lines(poly).iter().all(|l| l.side(p) >= Q::zero())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

pub fn on_segment(p: QPoint, a: QPoint, b: QPoint) -> bool {
    if !b.sub(a).cross(p.sub(a)).is_zero() {
        return false;
    }
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Exact point-in-polygon classification for a simple polygon.
pub fn locate(p: QPoint, poly: &[QPoint]) -> Containment {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if on_segment(p, a, b) {
            return Containment::Boundary;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// Splits a simple polygon by a line crossing its boundary at exactly two
/// points. Returns `(positive side, negative side)`.
pub fn split_by_line(poly: &[QPoint], line: &Line) -> Option<(Vec<QPoint>, Vec<QPoint>)> {
    let n = poly.len();
    let mut aug: Vec<(QPoint, Q)> = Vec::with_capacity(n + 2);
    let (mut pos, mut neg) = (false, false);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let sp = line.side(p);
        let sq = line.side(q);
        pos |= sp > Q::zero();
        neg |= sp < Q::zero();
        aug.push((p, sp));
        if (sp > Q::zero() && sq < Q::zero()) || (sp < Q::zero() && sq > Q::zero()) {
            aug.push((intersect_on(line, p, q), Q::zero()));
        }
    }
    if !(pos && neg) {
        return None;
    }
    let on: Vec<usize> = aug.iter().enumerate().filter(|(_, (_, s))| s.is_zero()).map(|(i, _)| i).collect();
    if on.len() != 2 {
        return None;
    }
    let m = aug.len();
    let chain = |from: usize, to: usize| -> Vec<QPoint> {
        let mut out = Vec::new();
        let mut i = from;
        loop {
            out.push(aug[i].0);
            if i == to {
                break;
            }
            i = (i + 1) % m;
        }
        simplify(&out)
    };
    let first = chain(on[0], on[1]);
    let second = chain(on[1], on[0]);
    let probe = aug[(on[0] + 1) % m].1;
    let (p, q) = if probe > Q::zero() { (first, second) } else { (second, first) };
    if p.len() < 3 || q.len() < 3 {
        return None;
    }
    Some((p, q))
}

/// Lowest-then-leftmost vertex.
pub fn lex_min(points: &[QPoint]) -> Option<QPoint> {
    points.iter().copied().min_by(|a, b| a.lex_cmp(b))
}

pub fn translate(poly: &[QPoint], d: QPoint) -> Vec<QPoint> {
    poly.iter().map(|p| p.add(d)).collect()
}

pub fn centroid_of_vertices(poly: &[QPoint]) -> QPoint {
    let n = qi(poly.len() as i64);
    let s = poly.iter().fold(QPoint::int(0, 0), |acc, p| acc.add(*p));
    QPoint::new(s.x / n, s.y / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(n: i64) -> Vec<QPoint> {
        vec![QPoint::int(0, 0), QPoint::int(n, 0), QPoint::int(n, n), QPoint::int(0, n)]
    }

    #[test]
    fn areas_and_clipping() {
        assert_eq!(area(&sq(2)), qi(4));
        let line = Line::through(QPoint::int(1, 0), QPoint::int(1, 1));
        // Left of upward line through x=1 is x < 1.
        let left = clip_convex(&sq(2), &line);
        assert_eq!(area(&left), qi(2));
        assert!(left.iter().all(|p| p.x <= qi(1)));
    }

    #[test]
    fn difference_partitions_area() {
        let a = sq(4);
        let b = translate(&sq(2), QPoint::int(1, 1));
        let parts = convex_difference(&a, &b);
        let total: Q = parts.iter().map(|p| area(p)).sum();
        assert_eq!(total, qi(12));
        for (i, p) in parts.iter().enumerate() {
            assert_eq!(convex_overlap_area(&oriented(p.clone()), &b), qi(0));
            for r in &parts[i + 1..] {
                assert_eq!(convex_overlap_area(&oriented(p.clone()), &oriented(r.clone())), qi(0));
            }
        }
    }

    #[test]
    fn l_shape_triangulation_and_split() {
        let l = vec![
            QPoint::int(0, 0),
            QPoint::int(3, 0),
            QPoint::int(3, 1),
            QPoint::int(1, 1),
            QPoint::int(1, 3),
            QPoint::int(0, 3),
        ];
        let tris = triangulate(&l);
        let total: Q = tris.iter().map(|t| area(t)).sum();
        assert_eq!(total, area(&l));
        // x = 2 crosses the L's foot in exactly two points.
        let cut = Line::through(QPoint::int(2, 0), QPoint::int(2, 1));
        let (a, b) = split_by_line(&l, &cut).unwrap();
        assert_eq!(area(&a) + area(&b), area(&l));
        // y = 2 only crosses the upright: fine. y = 1 runs along an edge: rejected.
        assert!(split_by_line(&l, &Line::through(QPoint::int(0, 2), QPoint::int(1, 2))).is_some());
        assert!(split_by_line(&l, &Line::through(QPoint::int(0, 1), QPoint::int(1, 1))).is_none());
        // A diagonal through the notch meets the boundary four times.
        let diag = Line::through(QPoint::new(Q::new(1, 2), qi(0)), QPoint::new(qi(3), Q::new(5, 2)));
        assert!(split_by_line(&l, &diag).is_none() || {
            let (a, b) = split_by_line(&l, &diag).unwrap();
            area(&a) + area(&b) == area(&l)
        });
    }

    #[test]
    fn locate_classifies() {
        let s = sq(2);
        assert_eq!(locate(QPoint::int(1, 1), &s), Containment::Inside);
        assert_eq!(locate(QPoint::int(2, 1), &s), Containment::Boundary);
        assert_eq!(locate(QPoint::int(3, 1), &s), Containment::Outside);
    }
}
