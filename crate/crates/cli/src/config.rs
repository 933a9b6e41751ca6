//! Run configuration files.
//!
//! A config is TOML (or JSON, by extension). Domain and metric entries are either
//! inline tables or paths to files holding one; relative paths resolve against the
//! directory of the config that names them.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use cfinsler_core::geometry::DomainDescriptor;
use cfinsler_core::metric_spec::MetricDescriptor;
use cfinsler_core::squeezing::GridSpec;
use cfinsler_core::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
/// Directory searched for relative `--config` paths that do not exist as given.
pub const CONFIG_DIR_ENV: &str = "CFINSLER_CONFIG_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Curvature,
    Verify,
    Squeeze,
    Kobayashi,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Curvature => "curvature",
            Command::Verify => "verify",
            Command::Squeeze => "squeeze",
            Command::Kobayashi => "kobayashi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// One JSON document.
    #[default]
    Records,
    /// Comma-separated tables, numbers with 17 significant digits.
    Delimited,
}

/// An inline value or a path to a file holding one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Path(PathBuf),
    Inline(T),
}

impl<T: DeserializeOwned + Clone> Ref<T> {
    pub fn resolve(&self, base: &Path) -> Result<T> {
        match self {
            Ref::Inline(t) => Ok(t.clone()),
            Ref::Path(p) => read_document(&base.join(p)),
        }
    }
}

/// How the curvature constants of the equivalence checks are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Constants {
    Measured,
    Supplied { k: f64, a: f64, b: f64, c1: f64 },
}

impl Default for Constants {
    fn default() -> Self {
        Constants::Measured
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

fn default_samples() -> usize {
    200
}

fn default_fraction() -> f64 {
    0.5
}

fn default_grid() -> GridSpec {
    GridSpec::Radial { rays: 6, steps: 4, extent: 0.9 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    /// When present, must match the subcommand being run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub domain: Ref<DomainDescriptor>,
    /// The Finsler metric `G` (defaults per subcommand).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Ref<MetricDescriptor>>,
    /// The Kähler metric `h` of the Kobayashi/Kähler comparisons (default: Bergman).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kahler: Option<Ref<MetricDescriptor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<String>>,
    #[serde(default)]
    pub constants: Constants,
    /// Mixing constant of `H = C G + g_B`; default `sandwich_fraction * K/B`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default = "default_fraction")]
    pub sandwich_fraction: f64,
    /// Mixing constant of `C ℭ² + h`; default `0.9 * 4/B`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caratheodory_c: Option<f64>,
    #[serde(default = "default_grid")]
    pub grid: GridSpec,
    /// Overrides every check's default tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub output: OutputSpec,
    /// Record wall time in the report (breaks byte-identical reruns).
    #[serde(default)]
    pub timing: bool,
}

impl RunConfig {
    pub fn minimal(domain: DomainDescriptor) -> Self {
        Self {
            version: SCHEMA_VERSION,
            command: None,
            seed: None,
            samples: default_samples(),
            domain: Ref::Inline(domain),
            metric: None,
            kahler: None,
            checks: None,
            constants: Constants::Measured,
            c: None,
            sandwich_fraction: default_fraction(),
            caratheodory_c: None,
            grid: default_grid(),
            tolerance: None,
            output: OutputSpec::default(),
            timing: false,
        }
    }

    /// Replaces file references by their contents, so reports embed everything used.
    pub fn inline(&self, base: &Path) -> Result<Self> {
        let mut out = self.clone();
        out.domain = Ref::Inline(self.domain.resolve(base)?);
        if let Some(m) = &self.metric {
            out.metric = Some(Ref::Inline(m.resolve(base)?));
        }
        if let Some(m) = &self.kahler {
            out.kahler = Some(Ref::Inline(m.resolve(base)?));
        }
        Ok(out)
    }

    pub fn validate(&self, command: Command) -> Result<()> {
        if self.version != SCHEMA_VERSION {
            return Err(Error::Config(format!("config version {} is not supported (expected {SCHEMA_VERSION})", self.version)));
        }
        if let Some(c) = self.command {
            if c != command {
                return Err(Error::Config(format!("config is for `{}`, not `{}`", c.name(), command.name())));
            }
        }
        if self.seed.is_none() {
            return Err(Error::Config(format!("`{}` samples points and needs a seed (config `seed` or --seed)", command.name())));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::Config(format!("tolerance {t} must be finite and nonnegative")));
            }
        }
        Ok(())
    }
}

/// Reads a TOML document, or JSON when the extension is `.json`.
pub fn read_document<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    } else {
        toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    };
    parsed
}

/// `path` as given if it exists, else under the config directory from the environment.
pub fn locate_config(path: &Path) -> PathBuf {
    if path.is_relative() && !path.exists() {
        if let Ok(dir) = std::env::var(CONFIG_DIR_ENV) {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return candidate;
            }
        }
    }
    path.to_path_buf()
}

/// Loads a config and returns it with the directory its references resolve against.
pub fn load_config(path: &Path) -> Result<(RunConfig, PathBuf)> {
    let path = locate_config(path);
    let cfg: RunConfig = read_document(&path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}
