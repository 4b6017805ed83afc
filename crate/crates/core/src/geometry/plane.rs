use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::exact::{QPoint, Q};

/// Tolerance for every real-coordinate comparison.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(self, o: Point) -> f64 {
        self.sub(o).norm()
    }

    /// Counter-clockwise rotation about the origin (in a y-up frame).
    pub fn rotate(self, radians: f64) -> Point {
        let (s, c) = radians.sin_cos();
        Point::new(self.x * c - self.y * s, self.x * s + self.y * c)
    }

    pub fn approx_eq(self, o: Point, tol: f64) -> bool {
        (self.x - o.x).abs() <= tol && (self.y - o.y).abs() <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self> {
        if a.approx_eq(b, TOLERANCE) {
            return Err(Error::param("segment endpoints coincide"));
        }
        Ok(Self { a, b })
    }

    pub fn direction(&self) -> Point {
        self.b.sub(self.a)
    }

    pub fn length(&self) -> f64 {
        self.direction().norm()
    }
}

/// True iff the segments lie on one supporting line and share more than a point.
pub fn collinear_overlap(s1: &Segment, s2: &Segment) -> bool {
    let d1 = s1.direction();
    let d2 = s2.direction();
    let scale = d1.norm() * d2.norm();
    if d1.cross(d2).abs() > TOLERANCE * scale.max(1.0) {
        return false;
    }
    if d1.cross(s2.a.sub(s1.a)).abs() > TOLERANCE * d1.norm().max(1.0) * s2.a.sub(s1.a).norm().max(1.0) {
        return false;
    }
    let len2 = d1.dot(d1);
    let t0 = d1.dot(s2.a.sub(s1.a)) / len2;
    let t1 = d1.dot(s2.b.sub(s1.a)) / len2;
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let overlap = hi.min(1.0) - lo.max(0.0);
    overlap * len2.sqrt() > TOLERANCE
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    /// `y = c`
    Horizontal,
    /// `x = c`
    Vertical,
    /// `y = x + c`
    DiagonalUp,
    /// `y = -x + c`
    DiagonalDown,
}

/// A straight fold line with an exact rational offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FoldAxis {
    pub kind: AxisKind,
    pub offset: Q,
}

impl FoldAxis {
    /// Builds an axis that crosses the unit square in a segment of positive length.
    pub fn new(kind: AxisKind, offset: Q) -> Result<Self> {
        let zero = Q::from_integer(0);
        let one = Q::from_integer(1);
        let ok = match kind {
            AxisKind::Horizontal | AxisKind::Vertical => offset >= zero && offset <= one,
            AxisKind::DiagonalUp => offset > -one && offset < one,
            AxisKind::DiagonalDown => offset > zero && offset < Q::from_integer(2),
        };
        if !ok {
            return Err(Error::param(format!("fold axis {kind:?} with offset {offset} misses the unit sheet")));
        }
        Ok(Self { kind, offset })
    }

    pub fn vertical(c: Q) -> Result<Self> {
        Self::new(AxisKind::Vertical, c)
    }

    pub fn horizontal(c: Q) -> Result<Self> {
        Self::new(AxisKind::Horizontal, c)
    }

    /// `y = slope_sign * x + c`.
    pub fn diagonal(slope_sign: i8, c: Q) -> Result<Self> {
        match slope_sign {
            1 => Self::new(AxisKind::DiagonalUp, c),
            -1 => Self::new(AxisKind::DiagonalDown, c),
            _ => Err(Error::param("diagonal slope sign must be +1 or -1")),
        }
    }

    /// Signed side value; zero exactly on the axis.
    pub fn side_exact(&self, p: QPoint) -> Q {
        let c = self.offset;
        match self.kind {
            AxisKind::Vertical => p.x - c,
            AxisKind::Horizontal => p.y - c,
            AxisKind::DiagonalUp => p.y - p.x - c,
            AxisKind::DiagonalDown => p.y + p.x - c,
        }
    }

    pub fn side(&self, p: Point) -> f64 {
        let c = q_to_f64(self.offset);
        match self.kind {
            AxisKind::Vertical => p.x - c,
            AxisKind::Horizontal => p.y - c,
            AxisKind::DiagonalUp => p.y - p.x - c,
            AxisKind::DiagonalDown => p.y + p.x - c,
        }
    }

    pub fn reflect_exact(&self, p: QPoint) -> QPoint {
        let c = self.offset;
        let two = Q::from_integer(2);
        match self.kind {
            AxisKind::Vertical => QPoint::new(two * c - p.x, p.y),
            AxisKind::Horizontal => QPoint::new(p.x, two * c - p.y),
            AxisKind::DiagonalUp => QPoint::new(p.y - c, p.x + c),
            AxisKind::DiagonalDown => QPoint::new(c - p.y, c - p.x),
        }
    }

    /// Two distinct points on the axis line.
    pub fn anchor_points(&self) -> (QPoint, QPoint) {
        let c = self.offset;
        let zero = Q::from_integer(0);
        let one = Q::from_integer(1);
        match self.kind {
            AxisKind::Vertical => (QPoint::new(c, zero), QPoint::new(c, one)),
            AxisKind::Horizontal => (QPoint::new(zero, c), QPoint::new(one, c)),
            AxisKind::DiagonalUp => (QPoint::new(zero, c), QPoint::new(one, one + c)),
            AxisKind::DiagonalDown => (QPoint::new(zero, c), QPoint::new(one, c - one)),
        }
    }
}

pub fn q_to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Mirror image of `p` across `axis`.
pub fn reflect_across(p: Point, axis: &FoldAxis) -> Point {
    let c = q_to_f64(axis.offset);
    match axis.kind {
        AxisKind::Vertical => Point::new(2.0 * c - p.x, p.y),
        AxisKind::Horizontal => Point::new(p.x, 2.0 * c - p.y),
        AxisKind::DiagonalUp => Point::new(p.y - c, p.x + c),
        AxisKind::DiagonalDown => Point::new(c - p.y, c - p.x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn seg(ax: f64, ay: f64, bx: f64, by: f64) -> Segment {
        Segment::new(Point::new(ax, ay), Point::new(bx, by)).unwrap()
    }

    #[test]
    fn reflection_examples() {
        let v = FoldAxis::vertical(q(1, 2)).unwrap();
        assert!(reflect_across(Point::new(0.2, 0.5), &v).approx_eq(Point::new(0.8, 0.5), 1e-12));
        let d = FoldAxis::diagonal(1, q(0, 1)).unwrap();
        assert!(reflect_across(Point::new(0.3, 0.3), &d).approx_eq(Point::new(0.3, 0.3), 1e-12));
        let a = FoldAxis::diagonal(-1, q(1, 1)).unwrap();
        let r = reflect_across(Point::new(0.1, 0.4), &a);
        assert!(r.approx_eq(Point::new(0.6, 0.9), 1e-12));
        // Distances to two points on the axis are preserved.
        for t in [0.0, 0.35, 1.0] {
            let on = Point::new(t, 1.0 - t);
            assert!((on.dist(Point::new(0.1, 0.4)) - on.dist(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn axis_must_cross_sheet() {
        assert!(FoldAxis::vertical(q(3, 2)).is_err());
        assert!(FoldAxis::diagonal(1, q(1, 1)).is_err());
        assert!(FoldAxis::diagonal(-1, q(0, 1)).is_err());
        assert!(FoldAxis::diagonal(2, q(1, 2)).is_err());
    }

    #[test]
    fn overlap_examples() {
        assert!(collinear_overlap(&seg(0., 0., 2., 2.), &seg(1., 1., 3., 3.)));
        assert!(!collinear_overlap(&seg(0., 0., 1., 0.), &seg(0., 1., 1., 1.)));
        assert!(!collinear_overlap(&seg(0., 0., 2., 2.), &seg(2., 2., 3., 1.)));
        // Touching end to end on one line shares a single point only.
        assert!(!collinear_overlap(&seg(0., 0., 1., 0.), &seg(1., 0., 2., 0.)));
        assert!(collinear_overlap(&seg(0., 0., 3., 0.), &seg(2., 0., 1., 0.)));
    }

    fn axes() -> Vec<FoldAxis> {
        vec![
            FoldAxis::vertical(q(2, 5)).unwrap(),
            FoldAxis::horizontal(q(3, 4)).unwrap(),
            FoldAxis::diagonal(1, q(-1, 3)).unwrap(),
            FoldAxis::diagonal(-1, q(6, 5)).unwrap(),
        ]
    }

    #[test]
    fn reflection_is_isometric_involution() {
        let mut rng = SeededRng::new(11);
        for axis in axes() {
            for _ in 0..1000 {
                let p = Point::new(rng.unit() * 4.0 - 2.0, rng.unit() * 4.0 - 2.0);
                let o = Point::new(rng.unit() * 4.0 - 2.0, rng.unit() * 4.0 - 2.0);
                let (rp, ro) = (reflect_across(p, &axis), reflect_across(o, &axis));
                assert!((p.dist(o) - rp.dist(ro)).abs() < 1e-9);
                assert!(reflect_across(rp, &axis).approx_eq(p, 1e-9));
                assert!((axis.side(p) + axis.side(rp)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn exact_reflection_agrees_with_float() {
        for axis in axes() {
            let p = QPoint::new(q(1, 7), q(5, 9));
            let e = axis.reflect_exact(p);
            let f = reflect_across(p.to_f64(), &axis);
            assert!(e.to_f64().approx_eq(f, 1e-12));
            assert_eq!(axis.reflect_exact(e), p);
            let (a, b) = axis.anchor_points();
            assert_eq!(axis.side_exact(a), Q::from_integer(0));
            assert_eq!(axis.side_exact(b), Q::from_integer(0));
        }
    }
}
