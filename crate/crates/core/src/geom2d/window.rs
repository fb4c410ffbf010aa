use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::polygon::inward_halfplane;
use super::{ConvexPolygon, Point, Segment};

/// Convex observation window: either a convex polygon or a disc.
#[derive(Clone, Debug, PartialEq)]
pub enum Window<T> {
    Polygon(ConvexPolygon<T>),
    Disc { center: Point<T>, radius: T },
}

impl<T: Scalar> Window<T> {
    pub fn disc(center: Point<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::invalid("disc radius must be positive"));
        }
        Ok(Window::Disc { center, radius })
    }

    pub fn area(&self) -> T {
        match self {
            Window::Polygon(p) => p.area(),
            Window::Disc { radius, .. } => T::PI() * *radius * *radius,
        }
    }

    /// Centre and radius of a disc containing the window.
    pub fn circumscribed_disc(&self) -> (Point<T>, T) {
        match self {
            Window::Polygon(p) => {
                let (lo, hi) = p.bbox();
                let c = lo.midpoint(hi);
                (c, p.max_dist_from(c))
            }
            Window::Disc { center, radius } => (*center, *radius),
        }
    }

    /// Polygon containing the window on which tessellations are built: the
    /// window itself, or the circumscribed square of a disc.
    pub fn working_region(&self) -> ConvexPolygon<T> {
        match self {
            Window::Polygon(p) => p.clone(),
            Window::Disc { center, radius } => {
                ConvexPolygon::square(*center, *radius + *radius).expect("positive radius")
            }
        }
    }

    pub fn bbox(&self) -> (Point<T>, Point<T>) {
        match self {
            Window::Polygon(p) => p.bbox(),
            Window::Disc { center, radius } => {
                let r = Point::new(*radius, *radius);
                (*center - r, *center + r)
            }
        }
    }

    /// Closed containment with tolerance.
    pub fn contains(&self, x: Point<T>, eps: T) -> bool {
        match self {
            Window::Polygon(p) => p.contains(x, eps),
            Window::Disc { center, radius } => x.dist(*center) <= *radius + eps,
        }
    }

    /// Part of `seg` inside the window, if it has positive length.
    pub fn clip_segment(&self, seg: &Segment<T>, eps: T) -> Option<Segment<T>> {
        let d = seg.direction();
        let (mut t0, mut t1) = (T::zero(), T::one());
        match self {
            Window::Polygon(p) => {
                for e in p.edges() {
                    let (n, c) = inward_halfplane(&e);
                    // <a + t d, n> <= c
                    let num = c - n.dot(seg.a);
                    let den = n.dot(d);
                    if den.abs() <= T::epsilon() {
                        if num < -eps {
                            return None;
                        }
                        continue;
                    }
                    let t = num / den;
                    if den > T::zero() {
                        t1 = t1.min(t);
                    } else {
                        t0 = t0.max(t);
                    }
                }
            }
            Window::Disc { center, radius } => {
                let f = seg.a - *center;
                let a = d.norm2();
                let b = f.dot(d);
                let c = f.norm2() - *radius * *radius;
                let disc = b * b - a * c;
                if disc <= T::zero() {
                    return None;
                }
                let sq = disc.sqrt();
                t0 = t0.max((-b - sq) / a);
                t1 = t1.min((-b + sq) / a);
            }
        }
        if t1 <= t0 {
            return None;
        }
        let a = if t0 <= T::zero() { seg.a } else { seg.point_at(t0) };
        let b = if t1 >= T::one() { seg.b } else { seg.point_at(t1) };
        let out = Segment::new(a, b);
        (out.length() > eps).then_some(out)
    }

    /// Whether the window and the polygon share interior points.
    pub fn meets(&self, poly: &ConvexPolygon<T>, eps: T) -> bool {
        match self {
            Window::Polygon(w) => super::clip_to_window(poly, w, eps).is_some(),
            Window::Disc { center, radius } => {
                if poly.contains(*center, T::zero()) {
                    return true;
                }
                poly.edges().any(|e| dist_point_segment(*center, &e) < *radius - eps)
            }
        }
    }
}

pub(crate) fn dist_point_segment<T: Scalar>(x: Point<T>, s: &Segment<T>) -> T {
    let d = s.direction();
    let len2 = d.norm2();
    let t = if len2 > T::zero() { ((x - s.a).dot(d) / len2).max(T::zero()).min(T::one()) } else { T::zero() };
    x.dist(s.point_at(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_clips_chord() {
        let w = Window::disc(Point::new(0.0_f64, 0.0), 1.0).unwrap();
        let s = Segment::new(Point::new(-3.0, 0.0), Point::new(3.0, 0.0));
        let c = w.clip_segment(&s, 1e-12).unwrap();
        assert!((c.length() - 2.0).abs() < 1e-12);
        let miss = Segment::new(Point::new(-3.0, 2.0), Point::new(3.0, 2.0));
        assert!(w.clip_segment(&miss, 1e-12).is_none());
        let inner = Segment::new(Point::new(-0.1, 0.1), Point::new(0.2, 0.3));
        assert_eq!(w.clip_segment(&inner, 1e-12).unwrap(), inner);
    }

    #[test]
    fn polygon_clips_segment() {
        let w = Window::Polygon(ConvexPolygon::rect(0.0, 0.0, 1.0, 1.0).unwrap());
        let s = Segment::new(Point::new(-1.0, 0.5), Point::new(0.5, 0.5));
        let c = w.clip_segment(&s, 1e-12).unwrap();
        assert!(c.a.approx_eq(Point::new(0.0, 0.5), 1e-12));
        assert!(c.b.approx_eq(Point::new(0.5, 0.5), 1e-12));
        let outside = Segment::new(Point::new(2.0, 0.5), Point::new(3.0, 0.5));
        assert!(w.clip_segment(&outside, 1e-12).is_none());
    }

    #[test]
    fn disc_meets_polygons() {
        let w = Window::disc(Point::new(0.0, 0.0), 1.0).unwrap();
        let near = ConvexPolygon::rect(0.5, 0.5, 2.0, 2.0).unwrap();
        let far = ConvexPolygon::rect(0.8, 0.8, 2.0, 2.0).unwrap();
        assert!(w.meets(&near, 1e-12));
        assert!(!w.meets(&far, 1e-12));
        assert!((w.area() - std::f64::consts::PI).abs() < 1e-15);
        assert!((w.working_region().area() - 4.0).abs() < 1e-12);
    }
}
