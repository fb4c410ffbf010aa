use crate::scalar::Scalar;

use super::Point;

/// A line `{x : <x, v> = p}` with unit normal `v = (cos theta, sin theta)`.
///
/// `theta` is kept in `[0, pi)`; `p` is the signed distance from the origin
/// and may be negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line<T> {
    p: T,
    theta: T,
    normal: Point<T>,
}

impl<T: Scalar> Line<T> {
    /// Builds a line from its (p, theta) parameters. Any finite `theta` is
    /// accepted and folded into `[0, pi)`, flipping the sign of `p` if needed.
    pub fn new(p: T, theta: T) -> Self {
        let pi = T::PI();
        let two_pi = pi + pi;
        let mut th = theta % two_pi;
        if th < T::zero() {
            th = th + two_pi;
        }
        let mut p = p;
        if th >= pi {
            th = th - pi;
            p = -p;
        }
        // `theta % 2pi` can round to exactly pi.
        if th >= pi {
            th = T::zero();
            p = -p;
        }
        Line {
            p,
            theta: th,
            normal: Point::new(th.cos(), th.sin()),
        }
    }

    /// Line through two distinct points.
    pub fn through(a: Point<T>, b: Point<T>) -> Option<Self> {
        let d = b - a;
        let len = d.norm();
        if !(len > T::zero()) {
            return None;
        }
        let n = d.perp() * (T::one() / len);
        Some(Self::from_unit_normal(n, n.dot(a)))
    }

    /// Line `{x : <x, n> = c}` for a unit vector `n`.
    pub fn from_unit_normal(n: Point<T>, c: T) -> Self {
        let theta = n.y.atan2(n.x);
        let mut line = Self::new(c, theta);
        // keep the exact normal rather than cos(atan2(..)) up to sign
        let sign = if line.normal.dot(n) >= T::zero() { T::one() } else { -T::one() };
        line.normal = n * sign;
        line
    }

    #[inline]
    pub fn p(&self) -> T {
        self.p
    }

    #[inline]
    pub fn theta(&self) -> T {
        self.theta
    }

    #[inline]
    pub fn normal(&self) -> Point<T> {
        self.normal
    }

    #[inline]
    pub fn direction(&self) -> Point<T> {
        self.normal.perp()
    }

    /// `<x, v> - p`; negative on the "left" side used by `split_by_line`.
    #[inline]
    pub fn signed_distance(&self, x: Point<T>) -> T {
        self.normal.dot(x) - self.p
    }

    /// Foot of the perpendicular from the origin moved by `t` along the line.
    #[inline]
    pub fn point_at(&self, t: T) -> Point<T> {
        self.normal * self.p + self.direction() * t
    }

    /// Coordinate of `x` along the line direction.
    #[inline]
    pub fn param_of(&self, x: Point<T>) -> T {
        self.direction().dot(x)
    }

    pub fn intersection(&self, other: &Line<T>) -> Option<Point<T>> {
        let det = self.normal.cross(other.normal);
        if det.abs() <= T::epsilon() {
            return None;
        }
        let x = (self.p * other.normal.y - other.p * self.normal.y) / det;
        let y = (self.normal.x * other.p - other.normal.x * self.p) / det;
        Some(Point::new(x, y))
    }
}

/// A closed line segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment<T> {
    pub a: Point<T>,
    pub b: Point<T>,
}

impl<T: Scalar> Segment<T> {
    #[inline]
    pub fn new(a: Point<T>, b: Point<T>) -> Self {
        Segment { a, b }
    }

    /// Validating constructor; rejects endpoints closer than `eps`.
    pub fn try_new(a: Point<T>, b: Point<T>, eps: T) -> Option<Self> {
        (a.is_finite() && b.is_finite() && !a.approx_eq(b, eps)).then_some(Segment { a, b })
    }

    #[inline]
    pub fn length(&self) -> T {
        self.a.dist(self.b)
    }

    #[inline]
    pub fn direction(&self) -> Point<T> {
        self.b - self.a
    }

    #[inline]
    pub fn point_at(&self, t: T) -> Point<T> {
        self.a.lerp(self.b, t)
    }

    #[inline]
    pub fn midpoint(&self) -> Point<T> {
        self.a.midpoint(self.b)
    }

    /// Intersection point with another segment. Collinear overlaps and
    /// parallel segments yield `None`; endpoint contacts within `eps` count.
    pub fn intersect(&self, other: &Segment<T>, eps: T) -> Option<Point<T>> {
        let r = self.direction();
        let s = other.direction();
        let denom = r.cross(s);
        let rl = r.norm();
        let sl = s.norm();
        if denom.abs() <= T::epsilon() * rl * sl {
            return None;
        }
        let qp = other.a - self.a;
        let t = qp.cross(s) / denom;
        let u = qp.cross(r) / denom;
        let tt = eps / rl;
        let tu = eps / sl;
        if t < -tt || t > T::one() + tt || u < -tu || u > T::one() + tu {
            return None;
        }
        Some(self.point_at(t.max(T::zero()).min(T::one())))
    }

    /// Intersection with a full line; a segment lying on the line yields `None`.
    pub fn intersect_line(&self, line: &Line<T>, eps: T) -> Option<Point<T>> {
        let sa = snap(line.signed_distance(self.a), eps);
        let sb = snap(line.signed_distance(self.b), eps);
        if sa == T::zero() && sb == T::zero() {
            return None;
        }
        if sa == T::zero() {
            return Some(self.a);
        }
        if sb == T::zero() {
            return Some(self.b);
        }
        if (sa < T::zero()) == (sb < T::zero()) {
            return None;
        }
        let t = sa / (sa - sb);
        Some(self.point_at(t))
    }
}

#[inline]
pub(crate) fn snap<T: Scalar>(s: T, eps: T) -> T {
    if s.abs() <= eps {
        T::zero()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_is_folded_into_half_turn() {
        let l = Line::new(2.0_f64, 3.0 * std::f64::consts::PI / 2.0);
        assert!((l.theta() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((l.p() + 2.0).abs() < 1e-12);
        // same set of points
        let q = Point::new(5.0, -2.0);
        assert!(l.signed_distance(q).abs() < 1e-12);
    }

    #[test]
    fn line_through_points_contains_them() {
        let a = Point::new(1.0_f64, 2.0);
        let b = Point::new(-3.0, 0.5);
        let l = Line::through(a, b).unwrap();
        assert!(l.signed_distance(a).abs() < 1e-12);
        assert!(l.signed_distance(b).abs() < 1e-12);
        assert!(l.theta() >= 0.0 && l.theta() < std::f64::consts::PI);
    }

    #[test]
    fn perpendicular_lines_meet() {
        let h = Line::new(1.0_f64, std::f64::consts::FRAC_PI_2);
        let v = Line::new(2.0_f64, 0.0);
        let p = h.intersection(&v).unwrap();
        assert!(p.approx_eq(Point::new(2.0, 1.0), 1e-12));
        assert!(h.intersection(&Line::new(5.0, std::f64::consts::FRAC_PI_2)).is_none());
    }

    #[test]
    fn collinear_segments_do_not_intersect() {
        let s = Segment::new(Point::new(0.0, 0.0), Point::new(2.0, 0.0));
        let t = Segment::new(Point::new(1.0, 0.0), Point::new(3.0, 0.0));
        assert!(s.intersect(&t, 1e-9).is_none());
        let u = Segment::new(Point::new(1.0, -1.0), Point::new(1.0, 1.0));
        assert!(s.intersect(&u, 1e-9).unwrap().approx_eq(Point::new(1.0, 0.0), 1e-12));
    }
}
