use crate::error::Result;
use crate::geom2d::{clip_tagged, EPS_SCALE};
use crate::{ConvexPolygon, Line, Point};

use super::{assemble_edges, region_eps, Cell, EdgeSource, PlanarTessellation, TessellationKind};

/// Faces of the arrangement of `lines` inside `region`, built by splitting
/// every current cell with each line in turn.
pub fn build_line_tessellation(lines: &[Line], region: &ConvexPolygon) -> Result<PlanarTessellation> {
    build_line_tessellation_eps(lines, region, region_eps(region, EPS_SCALE))
}

pub(crate) fn build_line_tessellation_eps(
    lines: &[Line],
    region: &ConvexPolygon,
    eps: f64,
) -> Result<PlanarTessellation> {
    let mut cells: Vec<(Vec<Point>, Vec<EdgeSource>)> =
        vec![(region.vertices().to_vec(), vec![EdgeSource::Region; region.len()])];
    let mut next = Vec::new();
    for (li, line) in lines.iter().enumerate() {
        let n = line.normal();
        let p = line.p();
        let tag = EdgeSource::Line(li);
        for (vs, tags) in cells.drain(..) {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for v in &vs {
                let s = n.dot(*v) - p;
                lo = lo.min(s);
                hi = hi.max(s);
            }
            if lo >= -eps || hi <= eps {
                next.push((vs, tags));
                continue;
            }
            if let Some(part) = clip_tagged(&vs, &tags, n, p, tag, eps) {
                next.push(part);
            }
            if let Some(part) = clip_tagged(&vs, &tags, -n, -p, tag, eps) {
                next.push(part);
            }
        }
        std::mem::swap(&mut cells, &mut next);
    }
    let cells: Vec<Cell> = cells
        .into_iter()
        .map(|(vs, sources)| {
            let polygon = ConvexPolygon::from_ccw_unchecked(vs);
            Cell { anchor: polygon.centroid(), polygon, sources, nucleus: None, certified: true }
        })
        .collect();
    let edges = assemble_edges(&cells, eps, |_| None);
    Ok(PlanarTessellation {
        kind: TessellationKind::Plt,
        working_region: region.clone(),
        cells,
        edges,
        eps,
    })
}
