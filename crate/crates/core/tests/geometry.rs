use proptest::prelude::*;
use tcross::geom2d::{boundary_crossings, clip_to_window, split_by_line};
use tcross::tessellate::build_line_tessellation;
use tcross::{ConvexPolygon, Line, Point};

const EPS: f64 = 1e-10;

fn convex_polygon() -> impl Strategy<Value = ConvexPolygon> {
    (
        -2.0..2.0_f64,
        -2.0..2.0_f64,
        0.3..3.0_f64,
        prop::collection::vec(0.0..std::f64::consts::TAU, 3..12),
    )
        .prop_filter_map("degenerate polygon", |(cx, cy, r, mut angles)| {
            angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let vs = angles.iter().map(|a| Point::new(cx + r * a.cos(), cy + r * a.sin())).collect();
            ConvexPolygon::new(vs, 1e-6).ok().filter(|p| p.area() > 1e-3)
        })
}

fn line() -> impl Strategy<Value = Line> {
    (-4.0..4.0_f64, 0.0..std::f64::consts::PI).prop_map(|(p, t)| Line::new(p, t))
}

fn hull_area(mut pts: Vec<Point>) -> f64 {
    pts.sort_by(|a, b| a.lex_cmp(b));
    if pts.len() < 3 {
        return 0.0;
    }
    let mut h: Vec<Point> = Vec::new();
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while h.len() >= start + 2 && (h[h.len() - 1] - h[h.len() - 2]).cross(p - h[h.len() - 2]) <= 0.0 {
                h.pop();
            }
            h.push(p);
        }
        h.pop();
    }
    let n = h.len();
    (0..n).map(|i| h[i].cross(h[(i + 1) % n])).sum::<f64>() / 2.0
}

/// Intersection area from first principles: hull of the vertices of each
/// polygon inside the other plus all pairwise edge intersections.
fn brute_intersection_area(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    let mut pts = Vec::new();
    pts.extend(a.vertices().iter().filter(|v| b.contains(**v, EPS)));
    pts.extend(b.vertices().iter().filter(|v| a.contains(**v, EPS)));
    for e in a.edges() {
        for f in b.edges() {
            if let Some(x) = e.intersect(&f, EPS) {
                pts.push(x);
            }
        }
    }
    hull_area(pts)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn split_parts_sum_to_whole(poly in convex_polygon(), l in line()) {
        let (left, right) = split_by_line(&poly, &l, EPS).unwrap();
        let a = left.as_ref().map_or(0.0, |p| p.area()) + right.as_ref().map_or(0.0, |p| p.area());
        prop_assert!((a - poly.area()).abs() < 1e-9 * poly.area().max(1.0));
        if let Some(p) = &left {
            prop_assert!(p.vertices().iter().all(|v| l.signed_distance(*v) <= 1e-9));
        }
        if let Some(p) = &right {
            prop_assert!(p.vertices().iter().all(|v| l.signed_distance(*v) >= -1e-9));
        }
    }

    #[test]
    fn clip_matches_brute_force(a in convex_polygon(), b in convex_polygon()) {
        let ab = clip_to_window(&a, &b, EPS).map_or(0.0, |p| p.area());
        let ba = clip_to_window(&b, &a, EPS).map_or(0.0, |p| p.area());
        let brute = brute_intersection_area(&a, &b);
        prop_assert!((ab - ba).abs() < 1e-9, "{ab} {ba}");
        prop_assert!((ab - brute).abs() < 1e-8, "{ab} {brute}");
        prop_assert!(ab <= a.area().min(b.area()) + 1e-9);
    }

    #[test]
    fn crossings_match_sign_changes(poly in convex_polygon(), l in line()) {
        let s: Vec<f64> = poly.vertices().iter().map(|v| l.signed_distance(*v)).collect();
        // skip near-tangent instances; the count is only defined in general position
        prop_assume!(s.iter().all(|d| d.abs() > 1e-6));
        let n = s.len();
        let changes = (0..n).filter(|&i| (s[i] > 0.0) != (s[(i + 1) % n] > 0.0)).count();
        let pts = boundary_crossings(&poly, &l, EPS);
        prop_assert_eq!(pts.len(), changes);
        for p in pts {
            prop_assert!(l.signed_distance(p).abs() < 1e-9);
        }
    }

    #[test]
    fn diameter_is_max_vertex_distance(poly in convex_polygon()) {
        let vs = poly.vertices();
        let brute = vs.iter().flat_map(|a| vs.iter().map(move |b| a.dist(*b))).fold(0.0, f64::max);
        prop_assert!((poly.diameter() - brute).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn arrangement_obeys_euler_count(lines in prop::collection::vec(line(), 0..25)) {
        let region = ConvexPolygon::square(Point::origin(), 6.0).unwrap();
        let eps = 1e-9;
        let hits = lines
            .iter()
            .filter(|l| region.vertices().iter().any(|v| l.signed_distance(*v) > eps)
                && region.vertices().iter().any(|v| l.signed_distance(*v) < -eps))
            .count();
        let mut crossings = 0;
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                if let Some(x) = lines[i].intersection(&lines[j]) {
                    if x.x.abs() < 3.0 && x.y.abs() < 3.0 {
                        crossings += 1;
                    }
                }
            }
        }
        let t = build_line_tessellation(&lines, &region).unwrap();
        prop_assert_eq!(t.cells.len(), 1 + hits + crossings);
        let area: f64 = t.cells.iter().map(|c| c.polygon.area()).sum();
        prop_assert!((area - 36.0).abs() < 1e-9);
    }
}
