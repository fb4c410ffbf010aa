use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tcross::montecarlo::ExperimentConfig;
use tcross::nesting::ModelSpec;
use tcross::tessellate::{GeneratorOptions, WindowShape, DEFAULT_GUARD_MULTIPLIER};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: ModelSpec,
    #[serde(default)]
    pub window: Option<WindowConfig>,
    #[serde(default)]
    pub replications: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_guard")]
    pub guard_multiplier: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon_scale: f64,
    /// 0 = one worker per core.
    #[serde(default)]
    pub threads: usize,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub shape: WindowShape,
    pub rho: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub records_csv: Option<PathBuf>,
    #[serde(default)]
    pub summary_json: Option<PathBuf>,
}

fn default_guard() -> f64 {
    DEFAULT_GUARD_MULTIPLIER
}

fn default_epsilon() -> f64 {
    tcross::geom2d::EPS_SCALE
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io("cannot read config", path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: ConfigFile = serde_json::from_str(text).map_err(|e| CliError::Input(format!("bad config: {e}")))?;
        ModelSpec::new(cfg.model.initial, cfg.model.component)?;
        Ok(cfg)
    }

    /// Experiment settings, with command line overrides applied.
    pub fn experiment(&self, seed: Option<u64>, threads: Option<usize>, timing: bool) -> CliResult<ExperimentConfig> {
        let window = self.window.as_ref().ok_or_else(|| CliError::Input("config has no `window` section".into()))?;
        let replications =
            self.replications.ok_or_else(|| CliError::Input("config has no `replications` key".into()))?;
        let mut cfg =
            ExperimentConfig::new(self.model, window.shape, window.rho.clone(), replications, seed.unwrap_or(self.seed));
        cfg.generator = GeneratorOptions { guard_multiplier: self.guard_multiplier, eps_scale: self.epsilon_scale };
        cfg.threads = threads.unwrap_or(self.threads);
        cfg.timing = timing;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Output location: a configured path (relative paths are taken under
/// `out` when given) or `default_name` inside `out` (or the working directory).
pub fn resolve_output(configured: Option<&Path>, out: Option<&Path>, default_name: &str) -> PathBuf {
    match (configured, out) {
        (Some(p), Some(dir)) if p.is_relative() => dir.join(p),
        (Some(p), _) => p.to_path_buf(),
        (None, Some(dir)) => dir.join(default_name),
        (None, None) => PathBuf::from(default_name),
    }
}
