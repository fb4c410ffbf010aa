//! Nested tessellations and their T-crossing counts.
//!
//! Every cell of the initial tessellation receives an independent copy of
//! the component tessellation. The count for a cell is the number of points
//! where component edges cross the cell's own boundary inside the window;
//! the total over all cells is the crossing functional `Z`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom2d::bbox_of;
use crate::moments::{pht_nesting_moments, weak_nesting_moments, PvtConstants};
use crate::tessellate::{
    build_voronoi, extend_points, interior_edges, sample_lines_with, sample_points_with, PlanarTessellation, Rect,
    SeedStream, TessellationKind,
};
use crate::{ConvexPolygon, Line, MomentReport, Point, Segment, Window};

/// A tessellation model: kind and intensity (length intensity for lines,
/// nucleus intensity for Voronoi).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TessellationSpec {
    pub kind: TessellationKind,
    pub intensity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub initial: TessellationSpec,
    pub component: TessellationSpec,
}

impl ModelSpec {
    pub fn new(initial: TessellationSpec, component: TessellationSpec) -> Result<Self> {
        for (name, s) in [("initial", initial), ("component", component)] {
            if !(s.intensity > 0.0) || !s.intensity.is_finite() {
                return Err(Error::invalid(format!("{name} intensity must be positive, got {}", s.intensity)));
            }
        }
        Ok(ModelSpec { initial, component })
    }

    /// Limit moments of the crossing functional for this model.
    pub fn theory(&self, constants: &PvtConstants<f64>) -> Result<MomentReport> {
        match self.initial.kind {
            TessellationKind::Plt => {
                pht_nesting_moments(self.initial.intensity, self.component.kind, self.component.intensity, 2, 1)
            }
            TessellationKind::Pvt => weak_nesting_moments(
                TessellationKind::Pvt,
                self.initial.intensity,
                self.component.kind,
                self.component.intensity,
                constants,
            ),
        }
    }
}

/// Component edges generated around one cell.
#[derive(Clone, Debug, PartialEq)]
pub enum ComponentEdges {
    /// All component lines hitting a disc that encloses the boundary.
    Lines(Vec<Line>),
    /// Component nuclei sampled on a rectangle around the boundary.
    Voronoi(LocalVoronoi),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalVoronoi {
    pub nuclei: Vec<Point>,
    pub sampled: Rect,
}

impl LocalVoronoi {
    /// Explicit Voronoi edges inside the sampled rectangle.
    pub fn edges(&self) -> Result<Vec<Segment>> {
        if self.nuclei.len() < 2 {
            return Ok(Vec::new());
        }
        let r = &self.sampled;
        let region = ConvexPolygon::rect(r.lo.x, r.lo.y, r.hi.x, r.hi.y)?;
        let tess = build_voronoi(&self.nuclei, &region, 1.0)?;
        Ok(interior_edges(&tess).into_iter().map(|(s, _)| s).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CellCrossing {
    pub cell: usize,
    pub rank: usize,
    /// Crossing count of this cell.
    pub theta: u64,
    /// Length of the cell boundary inside the window.
    pub boundary_length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossingResult {
    pub z_total: u64,
    pub per_cell: Vec<CellCrossing>,
    /// Cells with part of their boundary inside the window.
    pub cells_touched: usize,
}

const COMPONENT_GUARD: f64 = 2.5;
const MAX_DOUBLINGS: u64 = 16;

fn boundary_eps(boundary: &[Segment]) -> f64 {
    let pts: Vec<Point> = boundary.iter().flat_map(|s| [s.a, s.b]).collect();
    let (lo, hi) = bbox_of(&pts);
    crate::geom2d::default_eps(lo.dist(hi))
}

fn enclosing_disc(boundary: &[Segment]) -> (Point, f64) {
    let pts: Vec<Point> = boundary.iter().flat_map(|s| [s.a, s.b]).collect();
    let (lo, hi) = bbox_of(&pts);
    let c = lo.midpoint(hi);
    let r = pts.iter().fold(0.0_f64, |m, p| m.max(p.dist(c)));
    (c, r * (1.0 + 1e-12) + 1e-12)
}

fn sampled_rect(boundary: &[Segment], guard: f64) -> Rect {
    let pts: Vec<Point> = boundary.iter().flat_map(|s| [s.a, s.b]).collect();
    let (lo, hi) = bbox_of(&pts);
    Rect { lo, hi }.expand(guard)
}

fn nearest(nuclei: &[Point], x: Point) -> usize {
    let mut best = 0;
    let mut bd = f64::INFINITY;
    for (i, y) in nuclei.iter().enumerate() {
        let d = y.dist2(x);
        if d < bd {
            bd = d;
            best = i;
        }
    }
    best
}

/// Points where the nearest nucleus changes along the segments, or `None`
/// if some nearest-nucleus disc along the way leaves `sampled`.
fn walk_crossings(nuclei: &[Point], sampled: &Rect, boundary: &[Segment], eps: f64) -> Option<Vec<Point>> {
    if nuclei.is_empty() {
        return None;
    }
    let certified = |x: Point, n: Point| sampled.inner_dist(x) >= x.dist(n);
    let mut out = Vec::new();
    for seg in boundary {
        let a = seg.a;
        let d = seg.direction();
        let len = d.norm();
        let mut cur = nearest(nuclei, a);
        if !certified(a, nuclei[cur]) {
            return None;
        }
        let mut t_cur = 0.0;
        let mut last_t = f64::NEG_INFINITY;
        for _ in 0..=4 * nuclei.len() {
            let n = nuclei[cur];
            let nn = n.norm2();
            let mut t_next = f64::INFINITY;
            let mut next = cur;
            for (j, y) in nuclei.iter().enumerate() {
                if j == cur {
                    continue;
                }
                let w = *y - n;
                let den = 2.0 * d.dot(w);
                if den <= 0.0 {
                    continue;
                }
                let t = (y.norm2() - nn - 2.0 * a.dot(w)) / den;
                if t < t_next {
                    t_next = t;
                    next = j;
                }
            }
            if t_next >= 1.0 || next == cur {
                if !certified(seg.b, n) {
                    return None;
                }
                break;
            }
            let t_next = t_next.max(t_cur);
            let x = seg.point_at(t_next);
            if !certified(x, n) {
                return None;
            }
            if (t_next - last_t) * len > eps {
                out.push(x);
                last_t = t_next;
            }
            t_cur = t_next;
            cur = next;
        }
    }
    Some(out)
}

fn dedup_points(mut pts: Vec<Point>, eps: f64) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(pts.len());
    for p in pts.drain(..) {
        if !out.iter().any(|q| q.approx_eq(p, eps)) {
            out.push(p);
        }
    }
    out
}

fn line_crossings(lines: &[Line], boundary: &[Segment], eps: f64) -> Vec<Point> {
    let mut pts = Vec::new();
    for l in lines {
        for s in boundary {
            if let Some(p) = s.intersect_line(l, eps) {
                pts.push(p);
            }
        }
    }
    dedup_points(pts, eps)
}

fn sample_local_voronoi<R: Rng + ?Sized>(
    lambda: f64,
    boundary: &[Segment],
    eps: f64,
    rng: &mut R,
) -> Result<(LocalVoronoi, Vec<Point>)> {
    let mut guard = COMPONENT_GUARD / lambda.sqrt();
    let mut sampled = sampled_rect(boundary, guard);
    let mut nuclei = sample_points_with(lambda, &sampled, rng)?;
    for _ in 0..MAX_DOUBLINGS {
        if let Some(pts) = walk_crossings(&nuclei, &sampled, boundary, eps) {
            return Ok((LocalVoronoi { nuclei, sampled }, pts));
        }
        guard *= 2.0;
        let larger = sampled_rect(boundary, guard);
        extend_points(&mut nuclei, lambda, &sampled, &larger, rng)?;
        sampled = larger;
    }
    Err(Error::Exactness("component Voronoi walk not certified".into()))
}

/// Independent component tessellation around the cell boundary `boundary`.
pub fn component_edges_for_cell(
    spec: &TessellationSpec,
    boundary: &[Segment],
    seeds: &SeedStream,
) -> Result<ComponentEdges> {
    if spec.intensity < 0.0 || !spec.intensity.is_finite() {
        return Err(Error::invalid("component intensity must be non-negative"));
    }
    if boundary.is_empty() || spec.intensity == 0.0 {
        return Ok(match spec.kind {
            TessellationKind::Plt => ComponentEdges::Lines(Vec::new()),
            TessellationKind::Pvt => ComponentEdges::Voronoi(LocalVoronoi {
                nuclei: Vec::new(),
                sampled: Rect { lo: Point::origin(), hi: Point::origin() },
            }),
        });
    }
    let mut rng = seeds.rng();
    match spec.kind {
        TessellationKind::Plt => {
            let (c, r) = enclosing_disc(boundary);
            Ok(ComponentEdges::Lines(sample_lines_with(spec.intensity, c, r, &mut rng)?))
        }
        TessellationKind::Pvt => {
            let eps = boundary_eps(boundary);
            Ok(ComponentEdges::Voronoi(sample_local_voronoi(spec.intensity, boundary, eps, &mut rng)?.0))
        }
    }
}

/// Number of distinct points where component edges cross `boundary`.
pub fn cell_crossing_count(edges: &ComponentEdges, boundary: &[Segment]) -> Result<u64> {
    if boundary.is_empty() {
        return Ok(0);
    }
    let eps = boundary_eps(boundary);
    match edges {
        ComponentEdges::Lines(lines) => Ok(line_crossings(lines, boundary, eps).len() as u64),
        ComponentEdges::Voronoi(v) => {
            if v.nuclei.len() < 2 {
                return Ok(0);
            }
            let pts = walk_crossings(&v.nuclei, &v.sampled, boundary, eps)
                .ok_or_else(|| Error::Exactness("component sample does not cover the boundary".into()))?;
            Ok(dedup_points(pts, eps).len() as u64)
        }
    }
}

/// Same count through explicit Voronoi edges; slower, used as a cross-check.
pub fn cell_crossing_count_explicit(edges: &ComponentEdges, boundary: &[Segment]) -> Result<u64> {
    if boundary.is_empty() {
        return Ok(0);
    }
    let eps = boundary_eps(boundary);
    match edges {
        ComponentEdges::Lines(lines) => Ok(line_crossings(lines, boundary, eps).len() as u64),
        ComponentEdges::Voronoi(v) => {
            let segs = v.edges()?;
            let mut pts = Vec::new();
            for b in boundary {
                pts.extend(crate::geom2d::segment_crossings(&segs, b, eps));
            }
            Ok(dedup_points(pts, eps).len() as u64)
        }
    }
}

/// Non-artificial boundary of a convex cell inside `window`.
pub fn exposed_boundary(cell: &ConvexPolygon, window: Option<&Window>, eps: f64) -> Vec<Segment> {
    cell.edges()
        .filter_map(|e| match window {
            Some(w) => w.clip_segment(&e, eps),
            None => Some(e),
        })
        .collect()
}

/// Draws a component and counts its crossings with `boundary` in one pass.
pub fn component_crossings(spec: &TessellationSpec, boundary: &[Segment], seeds: &SeedStream) -> Result<u64> {
    if boundary.is_empty() || spec.intensity == 0.0 {
        return Ok(0);
    }
    match spec.kind {
        TessellationKind::Plt => {
            let edges = component_edges_for_cell(spec, boundary, seeds)?;
            cell_crossing_count(&edges, boundary)
        }
        TessellationKind::Pvt => {
            if spec.intensity < 0.0 || !spec.intensity.is_finite() {
                return Err(Error::invalid("component intensity must be non-negative"));
            }
            let eps = boundary_eps(boundary);
            let (_, pts) = sample_local_voronoi(spec.intensity, boundary, eps, &mut seeds.rng())?;
            Ok(dedup_points(pts, eps).len() as u64)
        }
    }
}

/// Crossing functional of the nesting inside `window`. Cell `n` in
/// anchor rank order uses the component drawn from `seeds.child(n)`.
pub fn total_z(
    initial: &PlanarTessellation,
    spec: &ModelSpec,
    window: &Window,
    seeds: &SeedStream,
) -> Result<CrossingResult> {
    if let Some(i) = initial.cells.iter().position(|c| !c.certified) {
        return Err(Error::Exactness(format!("initial cell {i} is not certified")));
    }
    let mut per_cell = Vec::new();
    let mut z = 0;
    for (rank, ci) in initial.rank_order().into_iter().enumerate() {
        let boundary = initial.exposed_boundary(ci, window);
        if boundary.is_empty() {
            continue;
        }
        let theta = component_crossings(&spec.component, &boundary, &seeds.child(rank as u64))?;
        z += theta;
        per_cell.push(CellCrossing {
            cell: ci,
            rank,
            theta,
            boundary_length: boundary.iter().map(|s| s.length()).sum(),
        });
    }
    Ok(CrossingResult { z_total: z, cells_touched: per_cell.len(), per_cell })
}

/// Total chord length of `lines` in the open disc of radius `rho` at the origin.
pub fn line_length_in_disc(lines: &[Line], rho: f64) -> f64 {
    lines
        .iter()
        .filter(|l| l.p().abs() < rho)
        .map(|l| 2.0 * (rho * rho - l.p() * l.p()).sqrt())
        .sum()
}

/// Number of unordered pairs of lines meeting in the open disc of radius `rho`.
pub fn pair_intersections_in_disc(lines: &[Line], rho: f64) -> usize {
    let mut count = 0;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if let Some(x) = lines[i].intersection(&lines[j]) {
                if x.norm() < rho {
                    count += 1;
                }
            }
        }
    }
    count
}
