//! Run configuration: a flat `key = value` file overridden by flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use clap::{Args, ValueEnum};
use cubegap_core::primes::ScanMode;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

impl From<ModeArg> for ScanMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exhaustive => ScanMode::Exhaustive,
            ModeArg::Sampled => ScanMode::Sampled,
        }
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to the subcommand's default.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Flat key = value file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub report: Option<std::path::PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub out: Option<OutFormat>,
    /// Largest mollifier length A for the bound scans.
    #[arg(long, global = true)]
    pub limit: Option<usize>,
    #[arg(long = "grid-step", global = true)]
    pub grid_step: Option<f64>,
    /// Quadrature tolerance.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long = "x-max", global = true)]
    pub x_max: Option<u64>,
    #[arg(long = "t-max", global = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub out: OutFormat,
    pub limit: usize,
    pub grid_step: Option<f64>,
    pub tolerance: f64,
    pub threads: Option<usize>,
    pub x_max: Option<u64>,
    pub t_max: Option<f64>,
    pub mode: ModeArg,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            out: OutFormat::Json,
            limit: 4096,
            grid_step: None,
            tolerance: 1e-8,
            threads: None,
            x_max: None,
            t_max: None,
            mode: ModeArg::Exhaustive,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError(format!("bad value for {key}: {v:?}")))
}

impl Config {
    /// Apply `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim().replace('_', "-"), v.trim());
            match k.as_str() {
                "out" => {
                    self.out = OutFormat::from_str(v, true).map_err(|_| ConfigError(format!("bad out: {v}")))?
                }
                "limit" => self.limit = parse(&k, v)?,
                "grid-step" => self.grid_step = Some(parse(&k, v)?),
                "tolerance" => self.tolerance = parse(&k, v)?,
                "threads" => self.threads = Some(parse(&k, v)?),
                "x-max" => self.x_max = Some(parse(&k, v)?),
                "t-max" => self.t_max = Some(parse(&k, v)?),
                "mode" => {
                    self.mode = ModeArg::from_str(v, true).map_err(|_| ConfigError(format!("bad mode: {v}")))?
                }
                _ => return Err(ConfigError(format!("line {}: unknown key {k:?}", i + 1))),
            }
        }
        Ok(())
    }

    pub fn apply_flags(&mut self, f: &Flags) {
        if let Some(v) = f.out {
            self.out = v;
        }
        if let Some(v) = f.limit {
            self.limit = v;
        }
        if f.grid_step.is_some() {
            self.grid_step = f.grid_step;
        }
        if let Some(v) = f.tolerance {
            self.tolerance = v;
        }
        if f.threads.is_some() {
            self.threads = f.threads;
        }
        if f.x_max.is_some() {
            self.x_max = f.x_max;
        }
        if f.t_max.is_some() {
            self.t_max = f.t_max;
        }
        if let Some(v) = f.mode {
            self.mode = v;
        }
    }

    pub fn load(flags: &Flags) -> Result<Self, ConfigError> {
        let mut c = Config::default();
        if let Some(p) = &flags.config {
            let text = read(p)?;
            c.apply_text(&text)?;
        }
        c.apply_flags(flags);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.limit < 16 {
            return Err(ConfigError(format!("limit = {} must be >= 16", self.limit)));
        }
        if let Some(g) = self.grid_step {
            if !(g > 0.0 && g.is_finite()) {
                return Err(ConfigError(format!("grid-step = {g} must be positive")));
            }
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(ConfigError(format!("tolerance = {} outside (0, 1)", self.tolerance)));
        }
        if self.threads == Some(0) {
            return Err(ConfigError("threads must be >= 1".into()));
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0 && t.is_finite()) {
                return Err(ConfigError(format!("t-max = {t} must be positive")));
            }
        }
        Ok(())
    }

    /// Inputs that determine the report contents. Thread count and output
    /// format are left out: they never change the numbers.
    pub fn canonical(&self) -> BTreeMap<String, String> {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "default".into());
        let mut m = BTreeMap::new();
        m.insert("limit".into(), self.limit.to_string());
        m.insert("grid-step".into(), opt(self.grid_step.map(|v| format!("{v:e}"))));
        m.insert("tolerance".into(), format!("{:e}", self.tolerance));
        m.insert("x-max".into(), opt(self.x_max.map(|v| v.to_string())));
        m.insert("t-max".into(), opt(self.t_max.map(|v| format!("{v:e}"))));
        m.insert("mode".into(), format!("{:?}", self.mode).to_lowercase());
        m
    }

    pub fn digest(&self, subcommand: &str) -> String {
        let mut h = Sha256::new();
        h.update(format!("subcommand={subcommand}\n"));
        for (k, v) in self.canonical() {
            h.update(format!("{k}={v}\n"));
        }
        hex::encode(h.finalize())
    }
}

fn read(p: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(p).map_err(|e| ConfigError(format!("cannot read {}: {e}", p.display())))
}
