use rand::Rng;

use crate::error::{Error, Result};
use crate::geom2d::{bbox_of, clip_tagged, inward_halfplane, EPS_SCALE};
use crate::{ConvexPolygon, Point};

use super::sample::{poisson_count, Rect};
use super::{assemble_edges, region_eps, Cell, EdgeSource, PlanarTessellation, SeedStream, TessellationKind};

/// Uniform bucket grid over a point set.
pub(crate) struct Grid {
    lo: Point,
    s: f64,
    nx: usize,
    ny: usize,
    start: Vec<u32>,
    items: Vec<u32>,
}

impl Grid {
    pub(crate) fn new(points: &[Point], bounds: &Rect) -> Grid {
        let w = bounds.hi.x - bounds.lo.x;
        let h = bounds.hi.y - bounds.lo.y;
        let n = points.len().max(1) as f64;
        let mut s = (w * h / n).sqrt();
        // keep the bucket count linear in the number of points
        s = s.max(w.max(h) / 4096.0);
        let nx = ((w / s).ceil() as usize).max(1);
        let ny = ((h / s).ceil() as usize).max(1);
        let mut counts = vec![0u32; nx * ny + 1];
        let lo = bounds.lo;
        let key = |p: &Point| {
            let ix = (((p.x - lo.x) / s) as usize).min(nx - 1);
            let iy = (((p.y - lo.y) / s) as usize).min(ny - 1);
            iy * nx + ix
        };
        for p in points {
            counts[key(p) + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; points.len()];
        for (i, p) in points.iter().enumerate() {
            let k = key(p);
            items[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        Grid { lo, s, nx, ny, start: counts, items }
    }

    pub(crate) fn spacing(&self) -> f64 {
        self.s
    }

    fn coords(&self, p: Point) -> (i64, i64) {
        let ix = (((p.x - self.lo.x) / self.s).floor() as i64).clamp(0, self.nx as i64 - 1);
        let iy = (((p.y - self.lo.y) / self.s).floor() as i64).clamp(0, self.ny as i64 - 1);
        (ix, iy)
    }

    fn bucket(&self, ix: i64, iy: i64) -> &[u32] {
        if ix < 0 || iy < 0 || ix >= self.nx as i64 || iy >= self.ny as i64 {
            return &[];
        }
        let k = iy as usize * self.nx + ix as usize;
        &self.items[self.start[k] as usize..self.start[k + 1] as usize]
    }

    /// Calls `f` on every point index in the buckets at Chebyshev distance
    /// exactly `r` from `(cx, cy)`.
    fn ring(&self, cx: i64, cy: i64, r: i64, mut f: impl FnMut(u32)) {
        if r == 0 {
            self.bucket(cx, cy).iter().for_each(|&i| f(i));
            return;
        }
        for ix in cx - r..=cx + r {
            self.bucket(ix, cy - r).iter().for_each(|&i| f(i));
            self.bucket(ix, cy + r).iter().for_each(|&i| f(i));
        }
        for iy in cy - r + 1..cy + r {
            self.bucket(cx - r, iy).iter().for_each(|&i| f(i));
            self.bucket(cx + r, iy).iter().for_each(|&i| f(i));
        }
    }

    fn max_ring(&self) -> i64 {
        self.nx.max(self.ny) as i64
    }
}

fn max_dist(vs: &[Point], c: Point) -> f64 {
    vs.iter().fold(0.0_f64, |m, v| m.max(v.dist2(c))).sqrt()
}

/// Unclipped Voronoi cell of nucleus `i` within the polygon `start`.
/// Neighbours are visited ring by ring and in order of distance within a
/// ring; the search stops once no unvisited nucleus can cut the cell.
pub(crate) fn voronoi_cell(
    points: &[Point],
    grid: &Grid,
    i: usize,
    start: &[Point],
    eps: f64,
) -> (Vec<Point>, Vec<EdgeSource>) {
    let c = points[i];
    let mut vs = start.to_vec();
    let mut tags = vec![EdgeSource::Region; vs.len()];
    let mut rmax = max_dist(&vs, c);
    let (cx, cy) = grid.coords(c);
    let mut batch: Vec<(f64, u32)> = Vec::new();
    for r in 0..=grid.max_ring() {
        batch.clear();
        grid.ring(cx, cy, r, |j| {
            if j as usize != i {
                batch.push((points[j as usize].dist2(c), j));
            }
        });
        batch.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for &(d2, j) in &batch {
            let d = d2.sqrt();
            if d > 2.0 * rmax || d == 0.0 {
                continue;
            }
            let q = points[j as usize];
            let n = (q - c) * (1.0 / d);
            let off = n.dot(c.midpoint(q));
            if vs.iter().all(|v| n.dot(*v) - off <= eps) {
                continue;
            }
            if let Some((nv, nt)) = clip_tagged(&vs, &tags, n, off, EdgeSource::Nucleus(j as usize), eps) {
                vs = nv;
                tags = nt;
                rmax = max_dist(&vs, c);
            }
        }
        if r as f64 * grid.spacing() >= 2.0 * rmax {
            break;
        }
    }
    (vs, tags)
}

fn rect_ring(r: &Rect) -> Vec<Point> {
    vec![r.lo, Point::new(r.hi.x, r.lo.y), r.hi, Point::new(r.lo.x, r.hi.y)]
}

fn clip_to_region(
    vs: &[Point],
    tags: &[EdgeSource],
    region: &ConvexPolygon,
    eps: f64,
) -> Option<(Vec<Point>, Vec<EdgeSource>)> {
    let mut cur = (vs.to_vec(), tags.to_vec());
    for e in region.edges() {
        let (n, c) = inward_halfplane(&e);
        cur = clip_tagged(&cur.0, &cur.1, n, c, EdgeSource::Region, eps)?;
    }
    Some(cur)
}

/// Voronoi tessellation of `nuclei`, clipped to `region`.
///
/// The nuclei are taken to be a complete sample of the generating process
/// on the bounding box of `region` enlarged by `guard`. A cell is certified
/// when, for each of its vertices `v` with nucleus `c`, the disc around `v`
/// of radius `|v - c|` lies in that sampled rectangle: no nucleus outside it
/// could then change the cell.
pub fn build_voronoi(nuclei: &[Point], region: &ConvexPolygon, guard: f64) -> Result<PlanarTessellation> {
    build_voronoi_eps(nuclei, region, guard, region_eps(region, EPS_SCALE))
}

pub(crate) fn build_voronoi_eps(
    nuclei: &[Point],
    region: &ConvexPolygon,
    guard: f64,
    eps: f64,
) -> Result<PlanarTessellation> {
    if nuclei.is_empty() {
        return Err(Error::invalid("Voronoi tessellation needs at least one nucleus"));
    }
    if !(guard > 0.0) {
        return Err(Error::invalid("guard width must be positive"));
    }
    if nuclei.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("non-finite nucleus"));
    }
    let (rlo, rhi) = region.bbox();
    let region_box = Rect { lo: rlo, hi: rhi };
    let frame = region_box.expand(guard);
    let (plo, phi) = bbox_of(nuclei);
    let bounds = Rect {
        lo: Point::new(plo.x.min(frame.lo.x), plo.y.min(frame.lo.y)),
        hi: Point::new(phi.x.max(frame.hi.x), phi.y.max(frame.hi.y)),
    };
    let grid = Grid::new(nuclei, &bounds);
    let start = rect_ring(&bounds.expand(grid.spacing()));

    let n = nuclei.len();
    let region_area = region.area();
    let mut cell_of = vec![None; n];
    let mut done = vec![false; n];
    let mut cells = Vec::new();
    let mut covered = 0.0;
    let mut margin = 2.0 * grid.spacing();
    loop {
        let reach = region_box.expand(margin);
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            if !reach.contains(nuclei[i]) {
                all_done = false;
                continue;
            }
            done[i] = true;
            let c = nuclei[i];
            let (vs, tags) = voronoi_cell(nuclei, &grid, i, &start, eps);
            let certified = vs.iter().all(|v| frame.inner_dist(*v) >= v.dist(c));
            let anchor = ConvexPolygon::from_ccw_unchecked(vs.clone()).centroid();
            if let Some((cv, ct)) = clip_to_region(&vs, &tags, region, eps) {
                let polygon = ConvexPolygon::from_ccw_unchecked(cv);
                covered += polygon.area();
                cell_of[i] = Some(cells.len());
                cells.push(Cell { polygon, sources: ct, anchor, nucleus: Some(c), certified });
            }
        }
        if all_done || (covered - region_area).abs() <= 1e-9 * region_area {
            break;
        }
        margin += grid.spacing();
    }
    let edges = assemble_edges(&cells, eps, |src| match src {
        EdgeSource::Nucleus(j) => cell_of[j],
        _ => None,
    });
    Ok(PlanarTessellation {
        kind: TessellationKind::Pvt,
        working_region: region.clone(),
        cells,
        edges,
        eps,
    })
}

/// Typical cell of a Poisson–Voronoi tessellation with intensity `gamma`:
/// the cell of an extra nucleus at the origin.
pub fn typical_voronoi_cell_with<R: Rng + ?Sized>(gamma: f64, rng: &mut R) -> Result<ConvexPolygon> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::invalid("typical cell needs a positive intensity"));
    }
    let mut radius = 4.0 / gamma.sqrt();
    let mut pts: Vec<(f64, Point)> = Vec::new();
    let mut inner = 0.0_f64;
    loop {
        // Poisson points on the annulus inner < |x| <= radius
        let area = std::f64::consts::PI * (radius * radius - inner * inner);
        let count = poisson_count(gamma * area, rng)?;
        for _ in 0..count {
            let u: f64 = rng.random();
            let r = (inner * inner + u * (radius * radius - inner * inner)).sqrt();
            let a = rng.random_range(0.0..2.0 * std::f64::consts::PI);
            pts.push((r, Point::new(r * a.cos(), r * a.sin())));
        }
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let eps = 1e-12 * radius;
        let mut vs = rect_ring(&Rect { lo: Point::new(-radius, -radius), hi: Point::new(radius, radius) });
        let mut tags = vec![(); 4];
        let mut rmax = max_dist(&vs, Point::origin());
        for &(d, q) in &pts {
            if d > 2.0 * rmax {
                break;
            }
            let n = q * (1.0 / d);
            if let Some((nv, nt)) = clip_tagged(&vs, &tags, n, 0.5 * d, (), eps) {
                vs = nv;
                tags = nt;
                rmax = max_dist(&vs, Point::origin());
            }
        }
        if 2.0 * rmax <= radius {
            return Ok(ConvexPolygon::from_ccw_unchecked(vs));
        }
        inner = radius;
        radius *= 2.0;
    }
}

pub fn typical_voronoi_cell(gamma: f64, seeds: &SeedStream) -> Result<ConvexPolygon> {
    typical_voronoi_cell_with(gamma, &mut seeds.rng())
}
