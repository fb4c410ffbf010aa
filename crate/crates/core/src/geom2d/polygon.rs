use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::line::snap;
use super::{Line, Point, Segment};

/// Convex polygon with counter-clockwise vertices.
///
/// Construction prunes duplicate and collinear vertices (within `eps`) and
/// reorients clockwise input.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon<T> {
    vertices: Vec<Point<T>>,
}

/// Basic measurements of a convex polygon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolygonMetrics<T> {
    pub area: T,
    pub perimeter: T,
    pub diameter: T,
    pub centroid: Point<T>,
    pub vertex_count: usize,
}

impl<T: Scalar> ConvexPolygon<T> {
    pub fn new(vertices: Vec<Point<T>>, eps: T) -> Result<Self> {
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("polygon has non-finite vertex"));
        }
        let mut vs = dedup_ring(vertices, eps);
        if vs.len() < 3 {
            return Err(Error::invalid("polygon needs at least 3 distinct vertices"));
        }
        if signed_area(&vs) < T::zero() {
            vs.reverse();
        }
        // drop collinear vertices
        let mut changed = true;
        while changed && vs.len() >= 3 {
            changed = false;
            let n = vs.len();
            for i in 0..n {
                let prev = vs[(i + n - 1) % n];
                let cur = vs[i];
                let next = vs[(i + 1) % n];
                let d = next - prev;
                let len = d.norm();
                let off = d.cross(cur - prev) / len;
                if off.abs() <= eps {
                    vs.remove(i);
                    changed = true;
                    break;
                }
            }
        }
        if vs.len() < 3 {
            return Err(Error::invalid("polygon is degenerate"));
        }
        let n = vs.len();
        for i in 0..n {
            let a = vs[i];
            let b = vs[(i + 1) % n];
            let c = vs[(i + 2) % n];
            let e = b - a;
            if e.cross(c - b) / e.norm() < -eps {
                return Err(Error::invalid("polygon is not convex"));
            }
        }
        let area = signed_area(&vs);
        if !(area > T::zero()) {
            return Err(Error::invalid("polygon has no area"));
        }
        Ok(ConvexPolygon { vertices: vs })
    }

    /// Wraps vertices already known to be a valid CCW convex ring.
    pub(crate) fn from_ccw_unchecked(vertices: Vec<Point<T>>) -> Self {
        debug_assert!(vertices.len() >= 3);
        ConvexPolygon { vertices }
    }

    /// Axis-aligned rectangle.
    pub fn rect(x0: T, y0: T, x1: T, y1: T) -> Result<Self> {
        if !(x1 > x0 && y1 > y0) {
            return Err(Error::invalid("rectangle must have positive extent"));
        }
        Ok(ConvexPolygon {
            vertices: vec![
                Point::new(x0, y0),
                Point::new(x1, y0),
                Point::new(x1, y1),
                Point::new(x0, y1),
            ],
        })
    }

    /// Square of the given side length centred at `center`.
    pub fn square(center: Point<T>, side: T) -> Result<Self> {
        let h = side * T::lit(0.5);
        Self::rect(center.x - h, center.y - h, center.x + h, center.y + h)
    }

    /// Regular `n`-gon inscribed in the circle of radius `r`.
    pub fn regular(center: Point<T>, r: T, n: usize) -> Result<Self> {
        if n < 3 || !(r > T::zero()) {
            return Err(Error::invalid("regular polygon needs n >= 3 and r > 0"));
        }
        let step = T::lit(2.0) * T::PI() / T::from(n).unwrap();
        let vertices = (0..n)
            .map(|i| {
                let a = step * T::from(i).unwrap();
                center + Point::new(a.cos(), a.sin()) * r
            })
            .collect();
        Ok(ConvexPolygon { vertices })
    }

    #[inline]
    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> Segment<T> {
        let n = self.vertices.len();
        Segment::new(self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment<T>> + '_ {
        (0..self.vertices.len()).map(move |i| self.edge(i))
    }

    pub fn area(&self) -> T {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> T {
        self.edges().fold(T::zero(), |acc, e| acc + e.length())
    }

    /// Maximum pairwise vertex distance (the diameter of a convex set).
    pub fn diameter(&self) -> T {
        let vs = &self.vertices;
        let mut best = T::zero();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                best = best.max(vs[i].dist2(vs[j]));
            }
        }
        best.sqrt()
    }

    pub fn centroid(&self) -> Point<T> {
        let vs = &self.vertices;
        let o = vs[0];
        let mut cx = T::zero();
        let mut cy = T::zero();
        let mut a2 = T::zero();
        for i in 1..vs.len() - 1 {
            let p = vs[i] - o;
            let q = vs[i + 1] - o;
            let w = p.cross(q);
            a2 = a2 + w;
            cx = cx + w * (p.x + q.x);
            cy = cy + w * (p.y + q.y);
        }
        let three = T::lit(3.0);
        o + Point::new(cx / (three * a2), cy / (three * a2))
    }

    pub fn metrics(&self) -> PolygonMetrics<T> {
        PolygonMetrics {
            area: self.area(),
            perimeter: self.perimeter(),
            diameter: self.diameter(),
            centroid: self.centroid(),
            vertex_count: self.vertices.len(),
        }
    }

    /// Closed containment test with tolerance `eps`.
    pub fn contains(&self, p: Point<T>, eps: T) -> bool {
        self.edges().all(|e| {
            let d = e.direction();
            d.cross(p - e.a) / d.norm() >= -eps
        })
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bbox(&self) -> (Point<T>, Point<T>) {
        bbox_of(&self.vertices)
    }

    /// Largest distance from `c` to a vertex.
    pub fn max_dist_from(&self, c: Point<T>) -> T {
        self.vertices.iter().fold(T::zero(), |m, v| m.max(v.dist2(c))).sqrt()
    }

    pub fn translate(&self, by: Point<T>) -> Self {
        ConvexPolygon { vertices: self.vertices.iter().map(|&v| v + by).collect() }
    }

    pub fn scale(&self, factor: T) -> Self {
        assert!(factor > T::zero());
        ConvexPolygon { vertices: self.vertices.iter().map(|&v| v * factor).collect() }
    }

    /// Part of the polygon with `<x, n> <= c`, or `None` if that part has
    /// empty interior.
    pub fn clip_halfplane(&self, n: Point<T>, c: T, eps: T) -> Option<Self> {
        let tags = vec![(); self.vertices.len()];
        let (vs, _) = clip_tagged(&self.vertices, &tags, n, c, (), eps)?;
        Some(ConvexPolygon { vertices: vs })
    }
}

pub(crate) fn signed_area<T: Scalar>(vs: &[Point<T>]) -> T {
    if vs.len() < 3 {
        return T::zero();
    }
    let o = vs[0];
    let mut a2 = T::zero();
    for i in 1..vs.len() - 1 {
        a2 = a2 + (vs[i] - o).cross(vs[i + 1] - o);
    }
    a2 * T::lit(0.5)
}

pub(crate) fn bbox_of<T: Scalar>(vs: &[Point<T>]) -> (Point<T>, Point<T>) {
    let mut lo = vs[0];
    let mut hi = vs[0];
    for v in &vs[1..] {
        lo.x = lo.x.min(v.x);
        lo.y = lo.y.min(v.y);
        hi.x = hi.x.max(v.x);
        hi.y = hi.y.max(v.y);
    }
    (lo, hi)
}

fn dedup_ring<T: Scalar>(vertices: Vec<Point<T>>, eps: T) -> Vec<Point<T>> {
    let mut out: Vec<Point<T>> = Vec::with_capacity(vertices.len());
    for v in vertices {
        if out.last().map_or(true, |l| !l.approx_eq(v, eps)) {
            out.push(v);
        }
    }
    while out.len() > 1 && out[0].approx_eq(*out.last().unwrap(), eps) {
        out.pop();
    }
    out
}

/// Clips a convex CCW ring to the half-plane `<x, n> <= c`, carrying one tag
/// per edge (edge `i` runs from vertex `i` to `i + 1`). Edges created along
/// the clipping line receive `new_tag`. Signed distances within `eps` of the
/// line are snapped onto it. Returns `None` when nothing with positive area
/// remains.
pub(crate) fn clip_tagged<T: Scalar, E: Copy>(
    vs: &[Point<T>],
    tags: &[E],
    n: Point<T>,
    c: T,
    new_tag: E,
    eps: T,
) -> Option<(Vec<Point<T>>, Vec<E>)> {
    let m = vs.len();
    let mut s: Vec<T> = Vec::with_capacity(m);
    let mut any_out = false;
    let mut any_in = false;
    for v in vs {
        let d = snap(n.dot(*v) - c, eps);
        any_out |= d > T::zero();
        any_in |= d < T::zero();
        s.push(d);
    }
    if !any_out {
        return Some((vs.to_vec(), tags.to_vec()));
    }
    if !any_in {
        return None;
    }
    let mut out_v: Vec<Point<T>> = Vec::with_capacity(m + 1);
    let mut out_t: Vec<E> = Vec::with_capacity(m + 1);
    let push = |p: Point<T>, t: E, out_v: &mut Vec<Point<T>>, out_t: &mut Vec<E>| {
        if let Some(last) = out_v.last() {
            if last.approx_eq(p, eps) {
                *out_t.last_mut().unwrap() = t;
                return;
            }
        }
        out_v.push(p);
        out_t.push(t);
    };
    for i in 0..m {
        let j = (i + 1) % m;
        let (sc, sn) = (s[i], s[j]);
        if sc <= T::zero() {
            let t = if sn > T::zero() && sc == T::zero() { new_tag } else { tags[i] };
            push(vs[i], t, &mut out_v, &mut out_t);
        }
        if (sc < T::zero() && sn > T::zero()) || (sc > T::zero() && sn < T::zero()) {
            let t = sc / (sc - sn);
            let p = vs[i].lerp(vs[j], t);
            let tag = if sc < T::zero() { new_tag } else { tags[i] };
            push(p, tag, &mut out_v, &mut out_t);
        }
    }
    while out_v.len() > 1 && out_v[0].approx_eq(*out_v.last().unwrap(), eps) {
        out_v.pop();
        out_t.pop();
    }
    if out_v.len() < 3 || !(signed_area(&out_v) > T::zero()) {
        return None;
    }
    Some((out_v, out_t))
}

/// Splits `poly` along `line` into the part with `<x, v> <= p` (left) and the
/// part with `<x, v> >= p` (right). A part is `None` when the line misses
/// the interior on that side.
pub fn split_by_line<T: Scalar>(
    poly: &ConvexPolygon<T>,
    line: &Line<T>,
    eps: T,
) -> Result<(Option<ConvexPolygon<T>>, Option<ConvexPolygon<T>>)> {
    if poly.len() < 3 || !(poly.area() > T::zero()) {
        return Err(Error::invalid("cannot split a degenerate polygon"));
    }
    let n = line.normal();
    let p = line.p();
    let left = poly.clip_halfplane(n, p, eps);
    let right = poly.clip_halfplane(-n, -p, eps);
    Ok((left, right))
}

/// Points where `line` meets the boundary of `poly`. A crossing that falls
/// within `eps` of a vertex is reported once, at that vertex.
pub fn boundary_crossings<T: Scalar>(poly: &ConvexPolygon<T>, line: &Line<T>, eps: T) -> Vec<Point<T>> {
    let vs = poly.vertices();
    let m = vs.len();
    let s: Vec<T> = vs.iter().map(|&v| snap(line.signed_distance(v), eps)).collect();
    let mut out = Vec::new();
    for i in 0..m {
        let j = (i + 1) % m;
        if s[i] == T::zero() {
            out.push(vs[i]);
        }
        if (s[i] < T::zero() && s[j] > T::zero()) || (s[i] > T::zero() && s[j] < T::zero()) {
            let t = s[i] / (s[i] - s[j]);
            out.push(vs[i].lerp(vs[j], t));
        }
    }
    out
}

/// All intersection points of `seg` with the segments of `boundary`.
/// Collinear overlaps contribute nothing; points closer than `eps` to an
/// earlier one are merged.
pub fn segment_crossings<T: Scalar>(boundary: &[Segment<T>], seg: &Segment<T>, eps: T) -> Vec<Point<T>> {
    let mut out: Vec<Point<T>> = Vec::new();
    for b in boundary {
        if let Some(p) = seg.intersect(b, eps) {
            if !out.iter().any(|q| q.approx_eq(p, eps)) {
                out.push(p);
            }
        }
    }
    out
}

pub fn metrics<T: Scalar>(poly: &ConvexPolygon<T>) -> Result<PolygonMetrics<T>> {
    if poly.len() < 3 || !(poly.area() > T::zero()) {
        return Err(Error::invalid("metrics of a degenerate polygon"));
    }
    Ok(poly.metrics())
}

/// Intersection of two convex polygons; `None` when the interiors are disjoint.
pub fn clip_to_window<T: Scalar>(poly: &ConvexPolygon<T>, window: &ConvexPolygon<T>, eps: T) -> Option<ConvexPolygon<T>> {
    let mut cur = poly.clone();
    for e in window.edges() {
        let (n, c) = inward_halfplane(&e);
        cur = cur.clip_halfplane(n, c, eps)?;
    }
    Some(cur)
}

/// Half-plane `<x, n> <= c` (unit `n`) lying to the left of a CCW edge.
#[inline]
pub(crate) fn inward_halfplane<T: Scalar>(e: &Segment<T>) -> (Point<T>, T) {
    let d = e.direction();
    let len = d.norm();
    let n = Point::new(d.y / len, -d.x / len);
    (n, n.dot(e.a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolygon<f64> {
        ConvexPolygon::rect(0.0, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn split_unit_square_in_half() {
        let (l, r) = split_by_line(&unit_square(), &Line::new(0.5, 0.0), 1e-9).unwrap();
        let (l, r) = (l.unwrap(), r.unwrap());
        assert!((l.area() - 0.5).abs() < 1e-12);
        assert!((r.area() - 0.5).abs() < 1e-12);
        assert!(l.vertices().iter().all(|v| v.x <= 0.5 + 1e-12));
    }

    #[test]
    fn split_by_missing_line() {
        let (l, r) = split_by_line(&unit_square(), &Line::new(2.0, 0.0), 1e-9).unwrap();
        assert_eq!(l.unwrap(), unit_square());
        assert!(r.is_none());
    }

    #[test]
    fn split_along_an_edge_leaves_square_whole() {
        let (l, r) = split_by_line(&unit_square(), &Line::new(1.0, 0.0), 1e-9).unwrap();
        assert!(l.is_some());
        assert!(r.is_none());
    }

    #[test]
    fn centered_square_crossings() {
        let sq = ConvexPolygon::square(Point::origin(), 1.0).unwrap();
        let mut pts = boundary_crossings(&sq, &Line::new(0.0, 0.0), 1e-9);
        pts.sort_by(|a, b| a.y.partial_cmp(&b.y).unwrap());
        assert_eq!(pts.len(), 2);
        assert!(pts[0].approx_eq(Point::new(0.0, -0.5), 1e-12));
        assert!(pts[1].approx_eq(Point::new(0.0, 0.5), 1e-12));
        assert!(boundary_crossings(&sq, &Line::new(0.8, 1.0), 1e-9).is_empty());
    }

    #[test]
    fn diagonal_through_vertices_reported_once() {
        let sq = unit_square();
        let diag = Line::through(Point::new(0.0, 0.0), Point::new(1.0, 1.0)).unwrap();
        assert_eq!(boundary_crossings(&sq, &diag, 1e-9).len(), 2);
    }

    #[test]
    fn unit_square_metrics() {
        let m = metrics(&unit_square()).unwrap();
        assert!((m.area - 1.0).abs() < 1e-15);
        assert!((m.perimeter - 4.0).abs() < 1e-15);
        assert!((m.diameter - 2f64.sqrt()).abs() < 1e-15);
        assert!(m.centroid.approx_eq(Point::new(0.5, 0.5), 1e-15));
        assert_eq!(m.vertex_count, 4);
    }

    #[test]
    fn triangle_metrics() {
        let t = ConvexPolygon::new(
            vec![Point::new(0.0_f64, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)],
            1e-9,
        )
        .unwrap();
        let m = t.metrics();
        assert!((m.area - 0.5).abs() < 1e-15);
        assert!((m.perimeter - (2.0 + 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn construction_normalizes_input() {
        // clockwise with a duplicate and a collinear vertex
        let p = ConvexPolygon::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(0.0, 1.0),
                Point::new(0.0, 1.0),
                Point::new(1.0, 1.0),
                Point::new(1.0, 0.5),
                Point::new(1.0, 0.0),
            ],
            1e-9,
        )
        .unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.area() > 0.0);
    }

    #[test]
    fn degenerate_polygons_rejected() {
        let line = vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(2.0, 2.0)];
        assert!(ConvexPolygon::new(line, 1e-9).is_err());
        let notch = vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(1.0, 0.5),
            Point::new(2.0, 2.0),
            Point::new(0.0, 2.0),
        ];
        assert!(ConvexPolygon::new(notch, 1e-9).is_err());
        assert!(ConvexPolygon::new(vec![Point::new(0.0, f64::NAN); 3], 1e-9).is_err());
    }

    #[test]
    fn clip_nested_and_disjoint() {
        let big = ConvexPolygon::rect(-2.0, -2.0, 2.0, 2.0).unwrap();
        let sq = unit_square();
        assert!((clip_to_window(&sq, &big, 1e-9).unwrap().area() - 1.0).abs() < 1e-14);
        let far = ConvexPolygon::rect(5.0, 5.0, 6.0, 6.0).unwrap();
        assert!(clip_to_window(&sq, &far, 1e-9).is_none());
        let shifted = ConvexPolygon::rect(0.5, 0.25, 1.5, 2.0).unwrap();
        let o = clip_to_window(&sq, &shifted, 1e-9).unwrap();
        assert!((o.area() - 0.5 * 0.75).abs() < 1e-14);
    }

    #[test]
    fn segment_crossings_inside_and_outward() {
        let sq = unit_square();
        let bnd: Vec<_> = sq.edges().collect();
        let inside = Segment::new(Point::new(0.2, 0.2), Point::new(0.8, 0.7));
        assert!(segment_crossings(&bnd, &inside, 1e-9).is_empty());
        let out = Segment::new(Point::new(0.5, 0.5), Point::new(10.0, 3.0));
        assert_eq!(segment_crossings(&bnd, &out, 1e-9).len(), 1);
        // through a corner: merged to one point
        let corner = Segment::new(Point::new(0.5, 0.5), Point::new(2.0, 2.0));
        assert_eq!(segment_crossings(&bnd, &corner, 1e-9).len(), 1);
    }
}
