use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nesting::{component_crossings, line_length_in_disc, pair_intersections_in_disc, TessellationSpec};
use crate::tessellate::{
    edge_length_in, generate_pvt, sample_isotropic_lines, typical_voronoi_cell, GeneratorOptions, SeedStream,
    WindowShape, WindowSpec,
};

use super::stats::{bootstrap, unbiased_variance};
use super::with_pool;

const RESAMPLES: usize = 1000;

/// A variance-type estimate with its bootstrap uncertainty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VarianceEstimate {
    pub estimate: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

/// `Var(values) / area` with a bootstrap standard error and 95% interval.
pub fn variance_per_area(values: &[f64], area: f64, seeds: &SeedStream) -> Result<VarianceEstimate> {
    if !(area > 0.0) {
        return Err(Error::invalid("area must be positive"));
    }
    let b = bootstrap(values, RESAMPLES, &mut seeds.rng(), |v| unbiased_variance(v) / area)?;
    Ok(VarianceEstimate { estimate: b.estimate, se: b.se, ci_low: b.ci_low, ci_high: b.ci_high, n: values.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrakkeEstimate {
    /// `(rho, area, Var(length)/area)` per rung.
    pub per_rho: Vec<(f64, f64, f64)>,
    /// Estimate at the largest rung.
    pub estimate: VarianceEstimate,
}

/// Variance per unit area of the total Poisson–Voronoi edge length in
/// square windows `[-rho, rho]^2`.
pub fn estimate_brakke(
    gamma: f64,
    rhos: &[f64],
    replications: usize,
    seed: u64,
    threads: usize,
) -> Result<BrakkeEstimate> {
    if rhos.is_empty() || replications < 2 {
        return Err(Error::invalid("need a non-empty ladder and at least 2 replications"));
    }
    let root = SeedStream::new(seed);
    let opts = GeneratorOptions::default();
    let mut per_rho = Vec::new();
    let mut last = None;
    for (i, &rho) in rhos.iter().enumerate() {
        let spec = WindowSpec::new(WindowShape::Square, rho)?;
        let window = spec.window();
        let lengths: Vec<Result<f64>> = with_pool(threads, || {
            (0..replications)
                .into_par_iter()
                .map(|r| {
                    let t = generate_pvt(gamma, &window, &opts, &root.child(i as u64).child(r as u64))?;
                    edge_length_in(&t, &window)
                })
                .collect()
        })?;
        let lengths = lengths.into_iter().collect::<Result<Vec<f64>>>()?;
        let area = spec.area();
        per_rho.push((rho, area, unbiased_variance(&lengths) / area));
        last = Some((lengths, area, i));
    }
    let (lengths, area, i) = last.expect("non-empty ladder");
    let estimate = variance_per_area(&lengths, area, &root.child(u64::MAX).child(i as u64))?;
    Ok(BrakkeEstimate { per_rho, estimate })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InnerVarianceEstimate {
    pub estimate: f64,
    pub se: f64,
    pub cells: usize,
    pub inner: usize,
}

/// Mean over `cells` typical Poisson–Voronoi cells (intensity `gamma`) of
/// the sample variance, over `inner` independent components, of the number
/// of component crossings on the cell boundary.
pub fn estimate_inner_variance_constant(
    component: &TessellationSpec,
    gamma: f64,
    cells: usize,
    inner: usize,
    seed: u64,
    threads: usize,
) -> Result<InnerVarianceEstimate> {
    if cells < 2 || inner < 2 {
        return Err(Error::invalid("need at least 2 cells and 2 inner replicates"));
    }
    let root = SeedStream::new(seed);
    let per_cell: Vec<Result<f64>> = with_pool(threads, || {
        (0..cells)
            .into_par_iter()
            .map(|k| {
                let cell = typical_voronoi_cell(gamma, &root.child(0).child(k as u64))?;
                let boundary: Vec<_> = cell.edges().collect();
                let inner_root = root.child(1).child(k as u64);
                let counts = (0..inner)
                    .map(|j| component_crossings(component, &boundary, &inner_root.child(j as u64)).map(|c| c as f64))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(unbiased_variance(&counts))
            })
            .collect()
    })?;
    let v = per_cell.into_iter().collect::<Result<Vec<f64>>>()?;
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    Ok(InnerVarianceEstimate { estimate: mean, se: (unbiased_variance(&v) / n).sqrt(), cells, inner })
}

/// Chord length and intersection count of isotropic Poisson lines in a disc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFunctionals {
    pub length: f64,
    pub intersections: usize,
}

pub fn line_functionals(
    lambda: f64,
    rho: f64,
    replications: usize,
    seed: u64,
    threads: usize,
) -> Result<Vec<LineFunctionals>> {
    let root = SeedStream::new(seed);
    let out: Vec<Result<LineFunctionals>> = with_pool(threads, || {
        (0..replications)
            .into_par_iter()
            .map(|r| {
                let lines = sample_isotropic_lines(lambda, rho, &root.child(r as u64))?;
                Ok(LineFunctionals {
                    length: line_length_in_disc(&lines, rho),
                    intersections: pair_intersections_in_disc(&lines, rho),
                })
            })
            .collect()
    })?;
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tessellate::TessellationKind;
    use rand::Rng;

    #[test]
    fn synthetic_cell_sums_recover_variance() {
        // window of area A holding A cells, each contributing an independent
        // U(0, 2) amount: Var(sum)/A = 1/3
        let area = 200.0;
        let mut rng = SeedStream::new(4).rng();
        let sums: Vec<f64> =
            (0..10_000).map(|_| (0..area as usize).map(|_| rng.random_range(0.0..2.0)).sum()).collect();
        let e = variance_per_area(&sums, area, &SeedStream::new(5)).unwrap();
        assert!((e.estimate - 1.0 / 3.0).abs() < 3.0 * e.se, "{e:?}");
        assert!(e.ci_low < e.estimate && e.estimate < e.ci_high);
    }

    #[test]
    fn fixed_cell_line_component_variance() {
        let spec = TessellationSpec { kind: TessellationKind::Plt, intensity: 1.0 };
        let e = estimate_inner_variance_constant(&spec, 1.0, 300, 60, 3, 1).unwrap();
        // Var = 4 lambda E P / pi = 16/pi
        let want = 16.0 / std::f64::consts::PI;
        assert!((e.estimate - want).abs() < 4.0 * e.se, "{e:?}");
    }

    #[test]
    fn small_brakke_run() {
        let b = estimate_brakke(1.0, &[3.0, 4.0], 20, 1, 1).unwrap();
        assert_eq!(b.per_rho.len(), 2);
        assert!(b.estimate.estimate > 0.0);
    }
}
