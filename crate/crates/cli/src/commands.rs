use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tcross::moments::{
    pht_intensity, pht_sigma2, PvtConstants, Regime, BRAKKE_CONSTANT,
    PVT_INNER_VARIANCE,
};
use tcross::montecarlo::{
    alternative_hypothesis, classify_rate, estimate_brakke, estimate_inner_variance_constant, jarque_bera,
    ks_critical_value, ks_test, line_functionals, run_experiment, standardize_values, summarize, summarize_run,
    variance_rate_fit, JbResult, KsResult, RateFit, ReplicateRecord, RunSummary, ALPHA,
};
use tcross::nesting::{ModelSpec, TessellationSpec};
use tcross::tessellate::{TessellationKind, WindowShape};
use tcross::MomentReport;

use crate::config::{resolve_output, ConfigFile};
use crate::error::{CliError, CliResult};
use crate::io::{read_records, read_sample, sig, write_json, write_records};

/// Significant digits of printed moment values.
pub const DIGITS: usize = 9;

fn model_label(m: &ModelSpec) -> String {
    format!("{}({})/{}({})", m.initial.kind, m.initial.intensity, m.component.kind, m.component.intensity)
}

fn regime_label(r: Regime) -> &'static str {
    match r {
        Regime::LongRange => "LONG_RANGE",
        Regime::ShortRange => "SHORT_RANGE",
    }
}

#[derive(Serialize)]
struct MomentsOutput<'a> {
    model: &'a ModelSpec,
    constants: &'a PvtConstants<f64>,
    report: &'a MomentReport,
}

pub fn moments(config: &Path, constants: &PvtConstants<f64>, out: Option<&Path>) -> CliResult<String> {
    let cfg = ConfigFile::load(config)?;
    let r = cfg.model.theory(constants)?;
    let mut s = String::new();
    let v = |x: f64| sig(x, DIGITS);
    writeln!(s, "model {}", model_label(&cfg.model)).unwrap();
    writeln!(s, "regime {}", regime_label(r.regime)).unwrap();
    writeln!(s, "dimension {}", r.dimension).unwrap();
    writeln!(s, "k {}", r.k).unwrap();
    writeln!(s, "mean_density {}", v(r.mean_density)).unwrap();
    writeln!(s, "asym_variance {}", v(r.asym_variance)).unwrap();
    writeln!(s, "norm_exponent {}", v(r.norm_exponent)).unwrap();
    writeln!(s, "facet_intensity {}", v(r.facet_intensity)).unwrap();
    writeln!(s, "facet_variance {}", v(r.facet_variance)).unwrap();
    writeln!(s, "component_surface_intensity {}", v(r.component_surface_intensity)).unwrap();
    writeln!(s, "component_section_intensity {}", v(r.component_section_intensity)).unwrap();
    writeln!(s, "component_variance {}", v(r.component_variance)).unwrap();
    writeln!(s, "m {}", r.m).unwrap();
    if let Some(dir) = out {
        write_json(&dir.join("moments.json"), &MomentsOutput { model: &cfg.model, constants, report: &r })?;
    }
    Ok(s)
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    seed: u64,
    shape: WindowShape,
    replications: usize,
    alpha: f64,
    constants: &'a PvtConstants<f64>,
    #[serde(flatten)]
    run: &'a RunSummary,
}

pub struct SimulateArgs<'a> {
    pub config: &'a Path,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<&'a Path>,
    pub timing: bool,
    pub constants: PvtConstants<f64>,
}

/// Runs the experiment; returns the printed report and the paths written.
pub fn simulate(a: &SimulateArgs) -> CliResult<(String, Vec<PathBuf>)> {
    let cfg = ConfigFile::load(a.config)?;
    let exp = cfg.experiment(a.seed, a.threads, a.timing)?;
    let records = run_experiment(&exp)?;
    let run = summarize_run(&exp.model, &records, &a.constants)?;
    let csv_path = resolve_output(cfg.output.records_csv.as_deref(), a.out, "records.csv");
    let json_path = resolve_output(cfg.output.summary_json.as_deref(), a.out, "summary.json");
    write_records(&csv_path, &records)?;
    let summary = SimulateOutput {
        seed: exp.seed,
        shape: exp.shape,
        replications: exp.replications,
        alpha: ALPHA,
        constants: &a.constants,
        run: &run,
    };
    write_json(&json_path, &summary)?;

    let mut s = String::new();
    writeln!(s, "model {}", model_label(&exp.model)).unwrap();
    writeln!(
        s,
        "theory mean_density {} asym_variance {} norm_exponent {}",
        sig(run.theory.mean_density, DIGITS),
        sig(run.theory.asym_variance, DIGITS),
        sig(run.theory.norm_exponent, DIGITS)
    )
    .unwrap();
    writeln!(s, "rho area n mean_density se mean_ok normalized_variance ks_D ks_ok jb_ok").unwrap();
    for r in &run.per_rho {
        let flag = |b: Option<bool>| b.map_or("na", |b| if b { "pass" } else { "fail" });
        writeln!(
            s,
            "{} {} {} {} {} {} {} {} {} {}",
            r.rho,
            sig(r.window_area, 6),
            r.replications,
            sig(r.mean_density, 6),
            sig(r.mean_density_se, 3),
            if r.mean_within_3se { "pass" } else { "fail" },
            sig(r.normalized_variance, 6),
            r.ks.map_or("na".to_string(), |k| sig(k.statistic, 4)),
            flag(r.ks_pass),
            flag(r.jb_pass),
        )
        .unwrap();
    }
    if let Some(f) = run.variance_rate {
        writeln!(s, "variance_rate {} stderr {} {}", sig(f.slope, 6), sig(f.stderr, 3), regime_label(classify_rate(f.slope)))
            .unwrap();
    }
    Ok((s, vec![csv_path, json_path]))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRung {
    pub rho: f64,
    pub window_area: f64,
    pub replications: usize,
    pub var_z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateReport {
    pub rungs: Vec<RateRung>,
    pub fit: RateFit,
    pub classification: &'static str,
    pub threshold: f64,
}

/// Per-rung variances and the log-log slope of a set of records.
pub fn rate_from_records(records: &[ReplicateRecord]) -> CliResult<RateReport> {
    let mut rhos: Vec<f64> = Vec::new();
    for r in records {
        if !rhos.contains(&r.rho) {
            rhos.push(r.rho);
        }
    }
    let mut rungs = Vec::new();
    for rho in rhos {
        let rec: Vec<&ReplicateRecord> = records.iter().filter(|r| r.rho == rho).collect();
        if rec.len() < 2 {
            return Err(CliError::Input(format!("rung rho = {rho} has fewer than 2 records")));
        }
        let zs: Vec<f64> = rec.iter().map(|r| r.z as f64).collect();
        rungs.push(RateRung {
            rho,
            window_area: rec[0].window_area,
            replications: zs.len(),
            var_z: summarize(&zs)?.variance,
        });
    }
    if rungs.len() < 3 {
        return Err(CliError::Input(format!("rate fit needs at least 3 ladder rungs, got {}", rungs.len())));
    }
    let pairs: Vec<(f64, f64)> = rungs.iter().map(|r| (r.window_area, r.var_z)).collect();
    let fit = variance_rate_fit(&pairs)?;
    Ok(RateReport {
        rungs,
        classification: regime_label(classify_rate(fit.slope)),
        threshold: tcross::montecarlo::RATE_THRESHOLD,
        fit,
    })
}

pub enum RateSource<'a> {
    Config { config: &'a Path, seed: Option<u64>, threads: Option<usize> },
    Records(&'a Path),
}

pub fn rate(source: RateSource, out: Option<&Path>) -> CliResult<String> {
    let records = match source {
        RateSource::Records(p) => read_records(p)?,
        RateSource::Config { config, seed, threads } => {
            let cfg = ConfigFile::load(config)?;
            let exp = cfg.experiment(seed, threads, false)?;
            if exp.rhos.len() < 3 {
                return Err(CliError::Input("rate needs a ladder of at least 3 rho values".into()));
            }
            run_experiment(&exp)?
        }
    };
    let rep = rate_from_records(&records)?;
    let mut s = String::new();
    writeln!(s, "rho area n var_z").unwrap();
    for r in &rep.rungs {
        writeln!(s, "{} {} {} {}", r.rho, sig(r.window_area, 6), r.replications, sig(r.var_z, 6)).unwrap();
    }
    writeln!(s, "slope {}", sig(rep.fit.slope, DIGITS)).unwrap();
    writeln!(s, "stderr {}", sig(rep.fit.stderr, 3)).unwrap();
    writeln!(s, "classification {}", rep.classification).unwrap();
    if let Some(dir) = out {
        write_json(&dir.join("rate.json"), &rep)?;
    }
    Ok(s)
}

/// One normalization of an external sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Standardization {
    pub regime: Regime,
    /// Model whose limit moments are used.
    pub model: ModelSpec,
    pub mean_density: f64,
    pub asym_variance: f64,
    pub norm_exponent: f64,
    pub standardized: Vec<f64>,
    pub sample_variance: f64,
    pub ks: KsResult,
    pub ks_critical: f64,
    pub ks_reject: bool,
    pub jb: Option<JbResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StandardizeReport {
    pub hypothesis: ModelSpec,
    pub n: usize,
    pub alpha: f64,
    /// Long range normalization first, then short range.
    pub tests: Vec<Standardization>,
}

/// Minimal number of observations for the normality tests.
pub const MIN_ROWS: usize = 8;

pub fn standardize_sample(
    data: &[(f64, f64)],
    hypothesis: &ModelSpec,
    constants: &PvtConstants<f64>,
) -> CliResult<StandardizeReport> {
    if data.len() < MIN_ROWS {
        return Err(CliError::Input(format!("need at least {MIN_ROWS} rows, got {}", data.len())));
    }
    let alt = alternative_hypothesis(hypothesis);
    let (long, short) = match hypothesis.initial.kind {
        TessellationKind::Plt => (*hypothesis, alt),
        TessellationKind::Pvt => (alt, *hypothesis),
    };
    let mut tests = Vec::new();
    for m in [long, short] {
        let t = m.theory(constants)?;
        let z = standardize_values(data, t.mean_density, t.norm_exponent);
        let ks = ks_test(&z, t.asym_variance)?;
        tests.push(Standardization {
            regime: t.regime,
            model: m,
            mean_density: t.mean_density,
            asym_variance: t.asym_variance,
            norm_exponent: t.norm_exponent,
            sample_variance: summarize(&z)?.variance,
            ks_critical: ks_critical_value(z.len(), ALPHA),
            ks_reject: ks.p_value < ALPHA,
            jb: jarque_bera(&z).ok(),
            ks,
            standardized: z,
        });
    }
    Ok(StandardizeReport { hypothesis: *hypothesis, n: data.len(), alpha: ALPHA, tests })
}

pub fn standardize(
    data: &Path,
    config: &Path,
    constants: &PvtConstants<f64>,
    out: Option<&Path>,
) -> CliResult<String> {
    let cfg = ConfigFile::load(config)?;
    let sample = read_sample(data)?;
    let rep = standardize_sample(&sample, &cfg.model, constants)?;
    let mut s = String::new();
    writeln!(s, "hypothesis {} n {}", model_label(&rep.hypothesis), rep.n).unwrap();
    writeln!(s, "normalization model exponent variance sample_variance ks_D ks_p outcome").unwrap();
    for t in &rep.tests {
        writeln!(
            s,
            "{} {} {} {} {} {} {} {}",
            regime_label(t.regime),
            model_label(&t.model),
            t.norm_exponent,
            sig(t.asym_variance, 6),
            sig(t.sample_variance, 6),
            sig(t.ks.statistic, 4),
            sig(t.ks.p_value, 3),
            if t.ks_reject { "REJECT" } else { "ACCEPT" }
        )
        .unwrap();
    }
    if let Some(dir) = out {
        write_json(&dir.join("standardize.json"), &rep)?;
    }
    Ok(s)
}

/// Which simulated constant to estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Brakke,
    InnerVariance,
    LineFunctionals,
}

/// Monte Carlo budget of `constants`. `None` fields take the defaults of
/// the chosen constant.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Budget {
    pub rho: Vec<f64>,
    pub replications: Option<usize>,
    pub cells: Option<usize>,
    pub inner: Option<usize>,
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub component: Option<TessellationKind>,
}

/// Default square-window ladder and replications for the edge length variance.
pub const BRAKKE_RHOS: [f64; 1] = [30.0];
pub const BRAKKE_REPLICATIONS: usize = 3000;
/// Default typical cells and components per cell for the inner variance.
pub const INNER_CELLS: usize = 2000;
pub const INNER_REPLICATES: usize = 200;
/// Default disc radius and replications for the line functionals.
pub const LINE_RHO: f64 = 50.0;
pub const LINE_REPLICATIONS: usize = 4000;
/// Smallest accepted budgets.
pub const MIN_REPLICATIONS: usize = 10;
pub const MIN_CELLS: usize = 10;
pub const MIN_INNER: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub name: &'static str,
    pub estimate: f64,
    pub se: f64,
    pub reference: f64,
    pub relative_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub which: &'static str,
    pub seed: u64,
    pub budget: serde_json::Value,
    pub estimates: Vec<ConstantEstimate>,
    /// `(rho, area, value)` per ladder rung, when a ladder is used.
    pub ladder: Vec<(f64, f64, f64)>,
}

fn estimate(name: &'static str, estimate: f64, se: f64, reference: f64) -> ConstantEstimate {
    ConstantEstimate { name, estimate, se, reference, relative_deviation: (estimate - reference) / reference }
}

fn at_least(what: &str, v: usize, min: usize) -> CliResult<usize> {
    if v < min {
        return Err(CliError::Input(format!("{what} must be at least {min}, got {v}")));
    }
    Ok(v)
}

pub fn estimate_constants(which: Which, budget: &Budget, seed: u64, threads: usize) -> CliResult<ConstantsReport> {
    let gamma = budget.gamma.unwrap_or(1.0);
    let lambda = budget.lambda.unwrap_or(1.0);
    match which {
        Which::Brakke => {
            let rhos = if budget.rho.is_empty() { BRAKKE_RHOS.to_vec() } else { budget.rho.clone() };
            let reps = at_least("replications", budget.replications.unwrap_or(BRAKKE_REPLICATIONS), MIN_REPLICATIONS)?;
            let b = estimate_brakke(gamma, &rhos, reps, seed, threads)?;
            // variance per area scales like sqrt(gamma)
            let reference = BRAKKE_CONSTANT * gamma.sqrt();
            Ok(ConstantsReport {
                which: "brakke",
                seed,
                budget: serde_json::json!({"gamma": gamma, "rho": rhos, "replications": reps, "window": "square"}),
                estimates: vec![estimate("edge_length_variance", b.estimate.estimate, b.estimate.se, reference)],
                ladder: b.per_rho,
            })
        }
        Which::InnerVariance => {
            let kind = budget.component.unwrap_or(TessellationKind::Pvt);
            let cells = at_least("cells", budget.cells.unwrap_or(INNER_CELLS), MIN_CELLS)?;
            let inner = at_least("inner", budget.inner.unwrap_or(INNER_REPLICATES), MIN_INNER)?;
            let spec = TessellationSpec { kind, intensity: lambda };
            let e = estimate_inner_variance_constant(&spec, gamma, cells, inner, seed, threads)?;
            let reference = match kind {
                TessellationKind::Pvt => PVT_INNER_VARIANCE * (gamma * lambda).sqrt(),
                TessellationKind::Plt => 16.0 / std::f64::consts::PI * gamma.sqrt() * lambda,
            };
            Ok(ConstantsReport {
                which: "inner-variance",
                seed,
                budget: serde_json::json!({
                    "gamma": gamma, "component": kind, "lambda": lambda, "cells": cells, "inner": inner
                }),
                estimates: vec![estimate("inner_variance", e.estimate, e.se, reference)],
                ladder: Vec::new(),
            })
        }
        Which::LineFunctionals => {
            let rho = match budget.rho.as_slice() {
                [] => LINE_RHO,
                [r] => *r,
                _ => return Err(CliError::Input("line functionals take a single rho".into())),
            };
            let reps = at_least("replications", budget.replications.unwrap_or(LINE_REPLICATIONS), MIN_REPLICATIONS)?;
            let f = line_functionals(lambda, rho, reps, seed, threads)?;
            let area = std::f64::consts::PI * rho * rho;
            let n = f.len() as f64;
            let lengths: Vec<f64> = f.iter().map(|x| x.length).collect();
            let counts: Vec<f64> = f.iter().map(|x| x.intersections as f64 / area).collect();
            let ls = summarize(&lengths)?;
            let cs = summarize(&counts)?;
            let norm = area.powf(1.5);
            // Var of a sample variance is about 2 s^4 / (n - 1) for near normal data
            let var_se = ls.variance * (2.0 / (n - 1.0)).sqrt() / norm;
            Ok(ConstantsReport {
                which: "line-functionals",
                seed,
                budget: serde_json::json!({"lambda": lambda, "rho": rho, "replications": reps, "window": "disc"}),
                estimates: vec![
                    estimate("length_density", ls.mean / area, (ls.variance / n).sqrt() / area, lambda),
                    estimate("length_variance", ls.variance / norm, var_se, pht_sigma2(lambda, 2, 1)?),
                    estimate("intersection_intensity", cs.mean, (cs.variance / n).sqrt(), pht_intensity(lambda, 2, 0)?),
                ],
                ladder: Vec::new(),
            })
        }
    }
}

pub fn constants(which: Which, budget: &Budget, seed: u64, threads: usize, out: Option<&Path>) -> CliResult<String> {
    let rep = estimate_constants(which, budget, seed, threads)?;
    let mut s = String::new();
    writeln!(s, "constant {} seed {}", rep.which, rep.seed).unwrap();
    for (rho, area, v) in &rep.ladder {
        writeln!(s, "rho {rho} area {} value {}", sig(*area, 6), sig(*v, 6)).unwrap();
    }
    writeln!(s, "name estimate se reference relative_deviation").unwrap();
    for e in &rep.estimates {
        writeln!(
            s,
            "{} {} {} {} {}",
            e.name,
            sig(e.estimate, 6),
            sig(e.se, 3),
            sig(e.reference, 8),
            sig(e.relative_deviation, 3)
        )
        .unwrap();
    }
    if let Some(dir) = out {
        write_json(&dir.join("constants.json"), &rep)?;
    }
    Ok(s)
}

