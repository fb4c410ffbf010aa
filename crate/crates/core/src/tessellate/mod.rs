//! Planar Poisson line and Poisson–Voronoi tessellations.
//!
//! Tessellations are built inside a convex working region `W+` that
//! contains the observation window. Cell edges lying on `∂W+` are marked
//! artificial; every other edge separates exactly two cells.

mod generate;
mod lines;
mod sample;
mod seed;
mod voronoi;

use std::collections::HashMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{ConvexPolygon, Point, Segment, Window};

pub use generate::{generate, generate_plt, generate_pvt, GeneratorOptions, DEFAULT_GUARD_MULTIPLIER};
pub use lines::build_line_tessellation;
pub use sample::{
    extend_points, poisson_count, sample_isotropic_lines, sample_lines_with, sample_points_with,
    sample_poisson_points, Rect,
};
pub use seed::SeedStream;
pub use voronoi::{build_voronoi, typical_voronoi_cell, typical_voronoi_cell_with};

/// Model of a planar tessellation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TessellationKind {
    /// Isotropic Poisson line tessellation; intensity is the length intensity.
    Plt,
    /// Poisson–Voronoi tessellation; intensity is the nucleus intensity.
    Pvt,
}

impl std::fmt::Display for TessellationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TessellationKind::Plt => "plt",
            TessellationKind::Pvt => "pvt",
        })
    }
}

/// What generated one edge of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeSource {
    /// Boundary of the working region (artificial).
    Region,
    /// Line with this index in the generating line list.
    Line(usize),
    /// Bisector with the nucleus of this index.
    Nucleus(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    /// Cell clipped to the working region.
    pub polygon: ConvexPolygon,
    /// `sources[i]` generated edge `i` of `polygon`.
    pub sources: Vec<EdgeSource>,
    /// Associated point: centroid of the unclipped cell when it is known,
    /// otherwise of the clipped one.
    pub anchor: Point,
    pub nucleus: Option<Point>,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub segment: Segment,
    pub cells: (usize, Option<usize>),
    pub artificial: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanarTessellation {
    pub kind: TessellationKind,
    pub working_region: ConvexPolygon,
    pub cells: Vec<Cell>,
    pub edges: Vec<Edge>,
    pub eps: f64,
}

/// Shape of the unit window `W1`; `W_rho = rho * W1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowShape {
    /// Unit disc.
    Disc,
    /// Square of side 2 centred at the origin.
    Square,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowSpec {
    pub shape: WindowShape,
    pub rho: f64,
}

impl WindowSpec {
    pub fn new(shape: WindowShape, rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::invalid(format!("window scale must be positive, got {rho}")));
        }
        Ok(WindowSpec { shape, rho })
    }

    pub fn window(&self) -> Window {
        match self.shape {
            WindowShape::Disc => Window::Disc { center: Point::origin(), radius: self.rho },
            WindowShape::Square => Window::Polygon(
                ConvexPolygon::square(Point::origin(), 2.0 * self.rho).expect("positive scale"),
            ),
        }
    }

    pub fn area(&self) -> f64 {
        self.window().area()
    }
}

impl PlanarTessellation {
    pub fn all_certified(&self) -> bool {
        self.cells.iter().all(|c| c.certified)
    }

    /// Pieces of the non-artificial boundary of `cell` inside `window`.
    pub fn exposed_boundary(&self, cell: usize, window: &Window) -> Vec<Segment> {
        let c = &self.cells[cell];
        let mut out = Vec::new();
        for (i, src) in c.sources.iter().enumerate() {
            if *src == EdgeSource::Region {
                continue;
            }
            if let Some(s) = window.clip_segment(&c.polygon.edge(i), self.eps) {
                out.push(s);
            }
        }
        out
    }

    /// Cell indices sorted lexicographically by anchor.
    pub fn rank_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.cells.len()).collect();
        idx.sort_by(|&a, &b| self.cells[a].anchor.lex_cmp(&self.cells[b].anchor).then(a.cmp(&b)));
        idx
    }

    /// Number of cells whose anchor lies in `window`.
    pub fn cell_count_in(&self, window: &Window) -> usize {
        self.cells.iter().filter(|c| window.contains(c.anchor, 0.0)).count()
    }

    /// Writes a line-oriented text dump: `cell <n> x0 y0 x1 y1 ...` per cell
    /// and `edge ax ay bx by i j` per interior edge.
    pub fn write_debug<W: Write>(&self, mut out: W) -> io::Result<()> {
        for c in &self.cells {
            write!(out, "cell {}", c.polygon.len())?;
            for v in c.polygon.vertices() {
                write!(out, " {:?} {:?}", v.x, v.y)?;
            }
            writeln!(out)?;
        }
        for (s, (i, j)) in interior_edges(self) {
            writeln!(out, "edge {:?} {:?} {:?} {:?} {} {}", s.a.x, s.a.y, s.b.x, s.b.y, i, j)?;
        }
        Ok(())
    }
}

/// Deduplicated non-artificial edges with their two incident cells.
pub fn interior_edges(tess: &PlanarTessellation) -> Vec<(Segment, (usize, usize))> {
    tess.edges
        .iter()
        .filter(|e| !e.artificial)
        .filter_map(|e| e.cells.1.map(|j| (e.segment, (e.cells.0, j))))
        .collect()
}

/// Total length of the interior edges inside `window`, each edge once.
pub fn edge_length_in(tess: &PlanarTessellation, window: &Window) -> Result<f64> {
    let (lo, hi) = window.bbox();
    let tol = tess.eps * 10.0;
    let inside = match window {
        Window::Polygon(p) => p.vertices().iter().all(|v| tess.working_region.contains(*v, tol)),
        Window::Disc { .. } => [lo, hi, Point::new(lo.x, hi.y), Point::new(hi.x, lo.y)]
            .iter()
            .all(|v| tess.working_region.contains(*v, tol)),
    };
    if !inside {
        return Err(Error::invalid("window exceeds the working region"));
    }
    Ok(tess
        .edges
        .iter()
        .filter(|e| !e.artificial)
        .filter_map(|e| window.clip_segment(&e.segment, tess.eps))
        .map(|s| s.length())
        .sum())
}

pub(crate) fn region_eps(region: &ConvexPolygon, scale: f64) -> f64 {
    let (lo, hi) = region.bbox();
    scale * region.max_dist_from(lo.midpoint(hi)).max(1.0)
}

/// Collects the edges of the cells, pairing the two sides of every
/// non-artificial edge. `neighbour` maps a source to the cell on its other
/// side when that is known directly.
pub(crate) fn assemble_edges(cells: &[Cell], eps: f64, neighbour: impl Fn(EdgeSource) -> Option<usize>) -> Vec<Edge> {
    let mut edges = Vec::new();
    let mut by_pair: HashMap<(usize, usize), usize> = HashMap::new();
    let mut by_line: HashMap<usize, Vec<(usize, Segment)>> = HashMap::new();
    for (ci, c) in cells.iter().enumerate() {
        for (k, src) in c.sources.iter().enumerate() {
            let seg = c.polygon.edge(k);
            match *src {
                EdgeSource::Region => edges.push(Edge { segment: seg, cells: (ci, None), artificial: true }),
                EdgeSource::Nucleus(_) => {
                    if seg.length() <= eps {
                        continue;
                    }
                    match neighbour(*src) {
                        Some(cj) => {
                            let key = (ci.min(cj), ci.max(cj));
                            by_pair.entry(key).or_insert_with(|| {
                                edges.push(Edge { segment: seg, cells: (key.0, Some(key.1)), artificial: false });
                                edges.len() - 1
                            });
                        }
                        None => edges.push(Edge { segment: seg, cells: (ci, None), artificial: false }),
                    }
                }
                EdgeSource::Line(l) => by_line.entry(l).or_default().push((ci, seg)),
            }
        }
    }
    let mut lines: Vec<_> = by_line.into_iter().collect();
    lines.sort_by_key(|(l, _)| *l);
    for (_, mut pieces) in lines {
        let dir = pieces[0].1.direction();
        let key = |s: &Segment| {
            let (a, b) = (s.a.dot(dir), s.b.dot(dir));
            (a.min(b), a.max(b))
        };
        let scale = dir.dot(dir).sqrt();
        let tol = 1e3 * eps * scale.max(1.0);
        pieces.sort_by(|x, y| key(&x.1).0.partial_cmp(&key(&y.1).0).unwrap().then(x.0.cmp(&y.0)));
        let mut i = 0;
        while i < pieces.len() {
            let (ci, s) = pieces[i];
            if i + 1 < pieces.len() {
                let (cj, t) = pieces[i + 1];
                let (ks, kt) = (key(&s), key(&t));
                if cj != ci && (ks.0 - kt.0).abs() <= tol && (ks.1 - kt.1).abs() <= tol {
                    edges.push(Edge { segment: s, cells: (ci.min(cj), Some(ci.max(cj))), artificial: false });
                    i += 2;
                    continue;
                }
            }
            if s.length() > eps {
                edges.push(Edge { segment: s, cells: (ci, None), artificial: false });
            }
            i += 1;
        }
    }
    edges
}
