use crate::error::{Error, Result};
use crate::Window;

use super::lines::build_line_tessellation_eps;
use super::sample::{extend_points, sample_lines_with, sample_points_with, Rect};
use super::voronoi::build_voronoi_eps;
use super::{region_eps, PlanarTessellation, SeedStream, TessellationKind};

/// Initial Voronoi guard in units of the mean nucleus spacing `1/sqrt(gamma)`.
pub const DEFAULT_GUARD_MULTIPLIER: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorOptions {
    /// Initial Voronoi guard times `sqrt(gamma)`.
    pub guard_multiplier: f64,
    /// Geometric tolerance relative to the circumradius of the working region.
    pub eps_scale: f64,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        GeneratorOptions { guard_multiplier: DEFAULT_GUARD_MULTIPLIER, eps_scale: crate::geom2d::EPS_SCALE }
    }
}

impl GeneratorOptions {
    fn validate(&self) -> Result<()> {
        if !(self.guard_multiplier > 0.0) || !self.guard_multiplier.is_finite() {
            return Err(Error::invalid("guard multiplier must be positive"));
        }
        if !(self.eps_scale > 0.0 && self.eps_scale < 1e-3) {
            return Err(Error::invalid("epsilon scale must lie in (0, 1e-3)"));
        }
        Ok(())
    }
}

const MAX_GUARD_DOUBLINGS: u64 = 12;

/// Poisson line tessellation with length intensity `lambda` on the working
/// region of `window`. Only lines hitting the disc circumscribing the
/// window are generated, which is exact for everything inside the window.
pub fn generate_plt(
    lambda: f64,
    window: &Window,
    opts: &GeneratorOptions,
    seeds: &SeedStream,
) -> Result<PlanarTessellation> {
    opts.validate()?;
    let (center, r) = window.circumscribed_disc();
    let lines = sample_lines_with(lambda, center, r, &mut seeds.rng())?;
    let region = window.working_region();
    build_line_tessellation_eps(&lines, &region, region_eps(&region, opts.eps_scale))
}

/// Poisson–Voronoi tessellation with nucleus intensity `gamma` on the
/// working region of `window`. Nuclei are sampled on the region enlarged by
/// `opts.guard_multiplier / sqrt(gamma)`; while some cell is not certified the
/// guard is doubled and the extra frame sampled independently.
pub fn generate_pvt(
    gamma: f64,
    window: &Window,
    opts: &GeneratorOptions,
    seeds: &SeedStream,
) -> Result<PlanarTessellation> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::invalid("Voronoi intensity must be positive"));
    }
    opts.validate()?;
    let region = window.working_region();
    let eps = region_eps(&region, opts.eps_scale);
    let (lo, hi) = region.bbox();
    let base = Rect { lo, hi };
    let mut guard = opts.guard_multiplier / gamma.sqrt();
    let mut sampled = base.expand(guard);
    let mut points = sample_points_with(gamma, &sampled, &mut seeds.child(0).rng())?;
    for attempt in 1..=MAX_GUARD_DOUBLINGS {
        if !points.is_empty() {
            let tess = build_voronoi_eps(&points, &region, guard, eps)?;
            if tess.all_certified() {
                return Ok(tess);
            }
        }
        guard *= 2.0;
        let larger = base.expand(guard);
        extend_points(&mut points, gamma, &sampled, &larger, &mut seeds.child(attempt).rng())?;
        sampled = larger;
    }
    Err(Error::Exactness(format!(
        "Voronoi cells still uncertified after {MAX_GUARD_DOUBLINGS} guard doublings"
    )))
}

pub fn generate(
    kind: TessellationKind,
    intensity: f64,
    window: &Window,
    opts: &GeneratorOptions,
    seeds: &SeedStream,
) -> Result<PlanarTessellation> {
    match kind {
        TessellationKind::Plt => generate_plt(intensity, window, opts, seeds),
        TessellationKind::Pvt => generate_pvt(intensity, window, opts, seeds),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tessellate::{WindowShape, WindowSpec};

    #[test]
    fn areas_cover_region() {
        let w = WindowSpec::new(WindowShape::Square, 4.0).unwrap().window();
        for kind in [TessellationKind::Plt, TessellationKind::Pvt] {
            let t = generate(kind, 1.0, &w, &GeneratorOptions::default(), &SeedStream::new(9)).unwrap();
            let a: f64 = t.cells.iter().map(|c| c.polygon.area()).sum();
            assert!((a - 64.0).abs() < 64.0 * 1e-6, "{kind}: {a}");
            assert!(t.all_certified());
        }
    }

    #[test]
    fn tiny_guard_is_repaired() {
        let w = WindowSpec::new(WindowShape::Square, 3.0).unwrap().window();
        let t = generate_pvt(1.0, &w, &GeneratorOptions { guard_multiplier: 0.05, ..Default::default() }, &SeedStream::new(1)).unwrap();
        assert!(t.all_certified());
    }

    #[test]
    fn deterministic() {
        let w = WindowSpec::new(WindowShape::Disc, 3.0).unwrap().window();
        let a = generate_pvt(2.0, &w, &GeneratorOptions::default(), &SeedStream::new(5)).unwrap();
        let b = generate_pvt(2.0, &w, &GeneratorOptions::default(), &SeedStream::new(5)).unwrap();
        assert_eq!(a, b);
    }
}
