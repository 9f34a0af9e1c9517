//! Job configuration: a flat `key = value` file overlaid by command-line flags.
//!
//! Recognised keys:
//!
//! | key | meaning |
//! |-----|---------|
//! | `mode` | `select`, `simulate` or `bootstrap` |
//! | `curves`, `responses` | input CSV paths |
//! | `method` | `bc`, `fdr`, or a comma list such as `bc,fdr` |
//! | `q` | a level in (0, 1) or `auto` |
//! | `degree`, `basis_size` | default basis for every predictor |
//! | `degree.<id>`, `basis_size.<id>` | per-predictor overrides |
//! | `domain.<id>` | `lo,hi` domain override for predictor `<id>` |
//! | `seed`, `reps`, `bootstrap_b`, `threads` | |
//! | `out`, `format` | output path and `jsonl` or `csv` |
//! | `sim.c`, `sim.n`, `sim.grid_size`, `sim.noise_x`, `sim.noise_y`, `sim.response` | simulation scenario |
//!
//! Later assignments win, so flags applied after the file override it. The
//! seed falls back to `FUNCSEL_SEED` and then to 0 when no assignment sets it.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::selection::{default_q, Method};
use crate::simgen::{ResponseModel, SimScenario};

pub const SEED_ENV: &str = "FUNCSEL_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Select,
    Simulate,
    Bootstrap,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "select" => Ok(Mode::Select),
            "simulate" => Ok(Mode::Simulate),
            "bootstrap" => Ok(Mode::Bootstrap),
            other => Err(Error::Config(format!(
                "unknown mode `{other}` (expected select, simulate or bootstrap)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Select => "select",
            Mode::Simulate => "simulate",
            Mode::Bootstrap => "bootstrap",
        })
    }
}

/// Test level: fixed, or resolved from `(n, M)` by [`default_q`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QSetting {
    Auto,
    Fixed(f64),
}

impl QSetting {
    pub fn resolve(self, n: usize, num_predictors: usize) -> f64 {
        match self {
            QSetting::Auto => default_q(n, num_predictors),
            QSetting::Fixed(q) => q,
        }
    }
}

impl FromStr for QSetting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(QSetting::Auto);
        }
        let q: f64 = s
            .parse()
            .map_err(|_| Error::Config(format!("q must be a number or `auto`, got `{s}`")))?;
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Config(format!("q must lie in (0, 1), got {q}")));
        }
        Ok(QSetting::Fixed(q))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    JsonLines,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(OutputFormat::JsonLines),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Config(format!("unknown format `{other}` (expected jsonl or csv)"))),
        }
    }
}

/// Basis settings for one predictor; `None` fields fall back to the defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BasisOverride {
    pub degree: Option<usize>,
    pub num_basis: Option<usize>,
    pub domain: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSettings {
    pub c: f64,
    pub n: usize,
    pub grid_size: usize,
    pub noise_x_mult: f64,
    pub noise_y_mult: f64,
    pub response: ResponseModel,
}

impl Default for SimSettings {
    fn default() -> Self {
        let s = SimScenario::new(0.0, 100, 0);
        Self {
            c: s.c,
            n: s.n,
            grid_size: s.grid_size,
            noise_x_mult: s.noise_x_mult,
            noise_y_mult: s.noise_y_mult,
            response: s.response,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub mode: Mode,
    pub curves: Option<PathBuf>,
    pub responses: Option<PathBuf>,
    pub degree: usize,
    pub num_basis: usize,
    pub basis_overrides: BTreeMap<String, BasisOverride>,
    pub methods: Vec<Method>,
    pub q: QSetting,
    pub seed: u64,
    pub reps: usize,
    pub bootstrap_b: usize,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub sim: SimSettings,
}

impl Default for JobConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Select,
            curves: None,
            responses: None,
            degree: 3,
            num_basis: 6,
            basis_overrides: BTreeMap::new(),
            methods: vec![Method::Fdr],
            q: QSetting::Auto,
            seed: 0,
            reps: 100,
            bootstrap_b: 100,
            threads: None,
            out: None,
            format: None,
            sim: SimSettings::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

impl JobConfig {
    /// Builds a configuration from ordered `(key, value)` assignments.
    ///
    /// `env_seed` is consulted only when no assignment sets `seed`.
    pub fn from_assignments<I, K, V>(assignments: I, env_seed: Option<&str>) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut cfg = JobConfig::default();
        let mut seed_set = false;
        for (k, v) in assignments {
            let (key, value) = (k.as_ref().trim(), v.as_ref().trim());
            if key == "seed" {
                seed_set = true;
            }
            cfg.apply(key, value)?;
        }
        if !seed_set {
            if let Some(s) = env_seed.filter(|s| !s.trim().is_empty()) {
                cfg.seed = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("{SEED_ENV} must be an unsigned integer, got `{s}`")))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        if let Some((base, id)) = key.split_once('.') {
            if base != "sim" {
                let entry = self.basis_overrides.entry(id.to_string()).or_default();
                match base {
                    "degree" => entry.degree = Some(parse(key, value)?),
                    "basis_size" => entry.num_basis = Some(parse(key, value)?),
                    "domain" => {
                        let (lo, hi) = value
                            .split_once(',')
                            .ok_or_else(|| Error::Config(format!("`{key}` must be `lo,hi`")))?;
                        entry.domain = Some((parse(key, lo)?, parse(key, hi)?));
                    }
                    _ => return Err(Error::Config(format!("unknown key `{key}`"))),
                }
                return Ok(());
            }
        }
        match key {
            "mode" => self.mode = value.parse()?,
            "curves" => self.curves = Some(PathBuf::from(value)),
            "responses" => self.responses = Some(PathBuf::from(value)),
            "method" => {
                self.methods = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?;
            }
            "q" => self.q = value.parse()?,
            "degree" => self.degree = parse(key, value)?,
            "basis_size" => self.num_basis = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "reps" => self.reps = parse(key, value)?,
            "bootstrap_b" => self.bootstrap_b = parse(key, value)?,
            "threads" => self.threads = Some(parse(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.parse()?),
            "sim.c" => self.sim.c = parse(key, value)?,
            "sim.n" => self.sim.n = parse(key, value)?,
            "sim.grid_size" => self.sim.grid_size = parse(key, value)?,
            "sim.noise_x" => self.sim.noise_x_mult = parse(key, value)?,
            "sim.noise_y" => self.sim.noise_y_mult = parse(key, value)?,
            "sim.response" => {
                self.sim.response = match value.to_ascii_lowercase().as_str() {
                    "benchmark" => ResponseModel::Benchmark,
                    "null" => ResponseModel::Null,
                    other => return Err(Error::Config(format!("unknown sim.response `{other}`"))),
                }
            }
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        match self.mode {
            Mode::Select | Mode::Bootstrap => {
                if self.curves.is_none() || self.responses.is_none() {
                    return Err(Error::Config(format!(
                        "mode {} requires both `curves` and `responses`",
                        self.mode
                    )));
                }
                if self.mode == Mode::Bootstrap && self.bootstrap_b == 0 {
                    return Err(Error::Config("bootstrap_b must be at least 1".into()));
                }
            }
            Mode::Simulate => {
                if self.reps == 0 {
                    return Err(Error::Config("reps must be at least 1".into()));
                }
                self.scenario().validate().map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Output format: explicit, else inferred from the `out` extension.
    pub fn output_format(&self) -> OutputFormat {
        self.format.unwrap_or_else(|| match self.out.as_deref().and_then(Path::extension) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => OutputFormat::Csv,
            _ => OutputFormat::JsonLines,
        })
    }

    pub fn scenario(&self) -> SimScenario {
        SimScenario {
            c: self.sim.c,
            n: self.sim.n,
            grid_size: self.sim.grid_size,
            noise_x_mult: self.sim.noise_x_mult,
            noise_y_mult: self.sim.noise_y_mult,
            seed: self.seed,
            response: self.sim.response,
        }
    }

    /// Effective basis settings `(degree, num_basis, domain override)` for a predictor.
    pub fn basis_for(&self, predictor_id: &str) -> (usize, usize, Option<(f64, f64)>) {
        let o = self.basis_overrides.get(predictor_id);
        (
            o.and_then(|o| o.degree).unwrap_or(self.degree),
            o.and_then(|o| o.num_basis).unwrap_or(self.num_basis),
            o.and_then(|o| o.domain),
        )
    }
}

/// Parses a flat configuration file into ordered assignments.
///
/// Blank lines and lines starting with `#` are ignored; everything else must
/// be `key = value`.
pub fn parse_config_text(text: &str, origin: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("{}:{}: expected `key = value`", origin.display(), idx + 1))
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_text(&text, path)
}
