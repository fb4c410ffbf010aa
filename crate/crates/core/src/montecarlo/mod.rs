//! Replication engine and statistics.
//!
//! Replicate `r` at ladder rung `i` draws all of its randomness from the
//! seed path `[i, r]` under the master seed, so records do not depend on
//! the number of worker threads or on scheduling.

mod constants;
mod stats;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{PvtConstants, Regime};
use crate::nesting::{total_z, ModelSpec, TessellationSpec};
use crate::tessellate::{edge_length_in, generate, GeneratorOptions, SeedStream, TessellationKind, WindowShape, WindowSpec};
use crate::MomentReport;

pub use constants::{
    estimate_brakke, estimate_inner_variance_constant, line_functionals, variance_per_area, BrakkeEstimate,
    InnerVarianceEstimate, LineFunctionals, VarianceEstimate,
};
pub use stats::{
    bootstrap, jarque_bera, kolmogorov_sf, ks_critical_value, ks_test, standardize_values, summarize,
    variance_rate_fit, Bootstrap, JbResult, KsResult, RateFit, Summary,
};

/// Significance level of the normality checks.
pub const ALPHA: f64 = 0.01;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub shape: WindowShape,
    /// Strictly increasing window scales.
    pub rhos: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
    pub generator: GeneratorOptions,
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
    /// Record wall-clock milliseconds (breaks byte-identical output).
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(model: ModelSpec, shape: WindowShape, rhos: Vec<f64>, replications: usize, seed: u64) -> Self {
        ExperimentConfig {
            model,
            shape,
            rhos,
            replications,
            seed,
            generator: GeneratorOptions::default(),
            threads: 0,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ModelSpec::new(self.model.initial, self.model.component)?;
        if self.replications == 0 {
            return Err(Error::invalid("replications must be positive"));
        }
        if self.rhos.is_empty() {
            return Err(Error::invalid("window ladder is empty"));
        }
        for r in &self.rhos {
            WindowSpec::new(self.shape, *r)?;
        }
        if self.rhos.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("window ladder must be strictly increasing"));
        }
        Ok(())
    }
}

/// Observables of one replicate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub rho: f64,
    pub window_area: f64,
    pub z: u64,
    pub edge_length: f64,
    pub cell_count: usize,
    pub seed: u64,
    pub millis: u64,
}

pub fn replicate_stream(master: u64, rung: usize, replicate: usize) -> SeedStream {
    SeedStream::new(master).child(rung as u64).child(replicate as u64)
}

/// Runs `f` on a rayon pool with `threads` workers (0 = default).
pub fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn run_replicate(config: &ExperimentConfig, rung: usize, replicate: usize) -> Result<ReplicateRecord> {
    let start = Instant::now();
    let rho = config.rhos[rung];
    let window = WindowSpec::new(config.shape, rho)?.window();
    let stream = replicate_stream(config.seed, rung, replicate);
    let m = &config.model;
    let tess = generate(m.initial.kind, m.initial.intensity, &window, &config.generator, &stream.child(0))?;
    let z = total_z(&tess, m, &window, &stream.child(1))?;
    Ok(ReplicateRecord {
        replicate,
        rho,
        window_area: window.area(),
        z: z.z_total,
        edge_length: edge_length_in(&tess, &window)?,
        cell_count: tess.cell_count_in(&window),
        seed: stream.seed(),
        millis: if config.timing { start.elapsed().as_millis() as u64 } else { 0 },
    })
}

/// All `replications x ladder` records, ordered by rung then replicate.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ReplicateRecord>> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> =
        (0..config.rhos.len()).flat_map(|i| (0..config.replications).map(move |r| (i, r))).collect();
    let results: Vec<Result<ReplicateRecord>> = with_pool(config.threads, || {
        jobs.par_iter()
            .map(|&(i, r)| {
                run_replicate(config, i, r)
                    .map_err(|e| e.context(&format!("replicate {r} at rho {}", config.rhos[i])))
            })
            .collect()
    })?;
    results.into_iter().collect()
}

/// Statistics of one ladder rung.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoSummary {
    pub rho: f64,
    pub window_area: f64,
    pub replications: usize,
    pub mean_z: f64,
    pub var_z: f64,
    /// `mean_z / area` with its standard error.
    pub mean_density: f64,
    pub mean_density_se: f64,
    pub mean_within_3se: bool,
    /// `var_z / area^(2 alpha)`, comparable with the asymptotic variance.
    pub normalized_variance: f64,
    pub edge_length_density: f64,
    pub mean_cell_count: f64,
    pub standardized: Vec<f64>,
    pub standardized_summary: Summary,
    pub ks: Option<KsResult>,
    pub ks_critical: f64,
    pub ks_pass: Option<bool>,
    pub jb: Option<JbResult>,
    pub jb_pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub model: ModelSpec,
    pub theory: MomentReport,
    pub per_rho: Vec<RhoSummary>,
    /// Slope of `log Var Z` against `log |W|` across the ladder.
    pub variance_rate: Option<RateFit>,
    pub rate_class: Option<Regime>,
}

/// Slope above which variance growth is classified as long range.
pub const RATE_THRESHOLD: f64 = 1.25;

pub fn classify_rate(slope: f64) -> Regime {
    if slope > RATE_THRESHOLD {
        Regime::LongRange
    } else {
        Regime::ShortRange
    }
}

/// Per-rung statistics against the theory of `model`, plus the rate fit
/// when the ladder has at least 3 rungs.
pub fn summarize_run(model: &ModelSpec, records: &[ReplicateRecord], constants: &PvtConstants<f64>) -> Result<RunSummary> {
    let theory = model.theory(constants)?;
    let mut rungs: Vec<f64> = Vec::new();
    for r in records {
        if !rungs.contains(&r.rho) {
            rungs.push(r.rho);
        }
    }
    let mut per_rho = Vec::new();
    for rho in rungs {
        let recs: Vec<&ReplicateRecord> = records.iter().filter(|r| r.rho == rho).collect();
        let area = recs[0].window_area;
        let zs: Vec<f64> = recs.iter().map(|r| r.z as f64).collect();
        let s = summarize(&zs)?;
        let n = zs.len() as f64;
        let data: Vec<(f64, f64)> = recs.iter().map(|r| (r.window_area, r.z as f64)).collect();
        let standardized = standardize_values(&data, theory.mean_density, theory.norm_exponent);
        let standardized_summary = summarize(&standardized)?;
        let ks = ks_test(&standardized, theory.asym_variance).ok();
        let ks_critical = ks_critical_value(zs.len(), ALPHA);
        let jb = jarque_bera(&standardized).ok();
        let mean_density = s.mean / area;
        let mean_density_se = (s.variance / n).sqrt() / area;
        per_rho.push(RhoSummary {
            rho,
            window_area: area,
            replications: zs.len(),
            mean_z: s.mean,
            var_z: s.variance,
            mean_density,
            mean_density_se,
            mean_within_3se: (mean_density - theory.mean_density).abs() <= 3.0 * mean_density_se,
            normalized_variance: s.variance / area.powf(2.0 * theory.norm_exponent),
            edge_length_density: recs.iter().map(|r| r.edge_length).sum::<f64>() / n / area,
            mean_cell_count: recs.iter().map(|r| r.cell_count as f64).sum::<f64>() / n,
            standardized,
            standardized_summary,
            ks_pass: ks.map(|k| k.p_value >= ALPHA),
            ks,
            ks_critical,
            jb_pass: jb.map(|j| j.p_value >= ALPHA),
            jb,
        });
    }
    let variance_rate = if per_rho.len() >= 3 {
        let pairs: Vec<(f64, f64)> = per_rho.iter().map(|r| (r.window_area, r.var_z)).collect();
        variance_rate_fit(&pairs).ok()
    } else {
        None
    };
    Ok(RunSummary {
        model: *model,
        theory,
        per_rho,
        rate_class: variance_rate.map(|f| classify_rate(f.slope)),
        variance_rate,
    })
}

/// Competing hypothesis for the model-selection check: the other initial
/// kind with the same edge length intensity and the same component.
pub fn alternative_hypothesis(model: &ModelSpec) -> ModelSpec {
    let initial = match model.initial.kind {
        // 2 sqrt(gamma) = lambda
        TessellationKind::Plt => {
            TessellationSpec { kind: TessellationKind::Pvt, intensity: (model.initial.intensity / 2.0).powi(2) }
        }
        TessellationKind::Pvt => {
            TessellationSpec { kind: TessellationKind::Plt, intensity: 2.0 * model.initial.intensity.sqrt() }
        }
    };
    ModelSpec { initial, component: model.component }
}
