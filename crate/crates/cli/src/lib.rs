//! Command line front end: `tcross moments | simulate | rate | standardize | constants`.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 I/O error,
//! 4 numerical or exactness error.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tcross::moments::PvtConstants;
use tcross::tessellate::TessellationKind;

use commands::{Budget, RateSource, SimulateArgs, Which};
use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "tcross", version, about = "T-crossings of nested planar random tessellations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct TheoryArgs {
    /// Override the asymptotic edge length variance constant of a unit Voronoi tessellation.
    #[arg(long)]
    pub brakke: Option<f64>,
    /// Override the Voronoi-in-Voronoi inner variance constant.
    #[arg(long)]
    pub inner_variance: Option<f64>,
}

impl TheoryArgs {
    fn constants(&self) -> CliResult<PvtConstants<f64>> {
        let mut c = PvtConstants::default();
        for (name, v, slot) in
            [("brakke", self.brakke, &mut c.brakke), ("inner-variance", self.inner_variance, &mut c.inner_variance)]
        {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(CliError::Input(format!("--{name} must be positive")));
                }
                *slot = v;
            }
        }
        Ok(c)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the limit moments of the configured model.
    Moments {
        #[arg(long)]
        config: PathBuf,
        /// Also write moments.json into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        theory: TheoryArgs,
    },
    /// Run the replication experiment; writes records.csv and summary.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (0 = one per core).
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall-clock milliseconds per replicate (output is then not reproducible).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        theory: TheoryArgs,
    },
    /// Fit the growth rate of Var Z against the window area.
    Rate {
        /// Simulate the configured ladder (at least 3 rho values).
        #[arg(long, required_unless_present = "records", conflicts_with = "records")]
        config: Option<PathBuf>,
        /// Fit existing records from `simulate` instead.
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        /// Also write rate.json into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Standardize an external `window_area,z` sample under both normalizations.
    Standardize {
        /// CSV with columns `window_area` and `z` (at least 8 rows).
        #[arg(long)]
        data: PathBuf,
        /// Config whose model is the hypothesis.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        theory: TheoryArgs,
    },
    /// Estimate simulated constants.
    ///
    /// Minimal budgets: 10 replications (brakke, line-functionals), 10 cells and
    /// 2 inner replicates (inner-variance).
    Constants {
        #[arg(long, value_enum)]
        which: WhichArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Window scales (brakke: ladder, default 30; line-functionals: one disc radius, default 50).
        #[arg(long, value_delimiter = ',')]
        rho: Vec<f64>,
        /// Replicates per rung (default 3000 for brakke, 4000 for line-functionals).
        #[arg(long)]
        replications: Option<usize>,
        /// Typical cells (inner-variance, default 2000).
        #[arg(long)]
        cells: Option<usize>,
        /// Components per cell (inner-variance, default 200).
        #[arg(long)]
        inner: Option<usize>,
        /// Voronoi cell intensity (default 1).
        #[arg(long)]
        gamma: Option<f64>,
        /// Component or line intensity (default 1).
        #[arg(long)]
        lambda: Option<f64>,
        /// Component kind for inner-variance (default pvt).
        #[arg(long, value_enum)]
        component: Option<KindArg>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhichArg {
    Brakke,
    InnerVariance,
    LineFunctionals,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindArg {
    Plt,
    Pvt,
}

fn positive(name: &str, v: Option<f64>) -> CliResult<Option<f64>> {
    match v {
        Some(x) if !(x > 0.0) || !x.is_finite() => Err(CliError::Input(format!("--{name} must be positive"))),
        _ => Ok(v),
    }
}

/// Runs one command; returns what goes to standard output.
pub fn execute(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Moments { config, out, theory } => commands::moments(&config, &theory.constants()?, out.as_deref()),
        Command::Simulate { config, seed, threads, out, timing, theory } => {
            let (text, written) = commands::simulate(&SimulateArgs {
                config: &config,
                seed,
                threads,
                out: out.as_deref(),
                timing,
                constants: theory.constants()?,
            })?;
            for p in written {
                eprintln!("wrote {}", p.display());
            }
            Ok(text)
        }
        Command::Rate { config, records, seed, threads, out } => {
            let source = match (&config, &records) {
                (_, Some(r)) => RateSource::Records(r),
                (Some(c), None) => RateSource::Config { config: c, seed, threads },
                (None, None) => return Err(CliError::Input("rate needs --config or --records".into())),
            };
            commands::rate(source, out.as_deref())
        }
        Command::Standardize { data, config, out, theory } => {
            commands::standardize(&data, &config, &theory.constants()?, out.as_deref())
        }
        Command::Constants { which, seed, threads, out, rho, replications, cells, inner, gamma, lambda, component } => {
            if rho.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
                return Err(CliError::Input("--rho values must be positive".into()));
            }
            let budget = Budget {
                rho,
                replications,
                cells,
                inner,
                gamma: positive("gamma", gamma)?,
                lambda: positive("lambda", lambda)?,
                component: component.map(|k| match k {
                    KindArg::Plt => TessellationKind::Plt,
                    KindArg::Pvt => TessellationKind::Pvt,
                }),
            };
            let which = match which {
                WhichArg::Brakke => Which::Brakke,
                WhichArg::InnerVariance => Which::InnerVariance,
                WhichArg::LineFunctionals => Which::LineFunctionals,
            };
            commands::constants(which, &budget, seed, threads, out.as_deref())
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: cannot write to standard output: {e}");
                    3
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
