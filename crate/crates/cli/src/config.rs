//! Run settings: built-in defaults, then an optional `key=value` file, then flags.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use pooldesign_core::scan::DEFAULT_PATIENCE;

use crate::failure::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Markdown,
}

impl OutputFormat {
    fn parse(s: &str) -> Option<Self> {
        <Self as ValueEnum>::from_str(s, true).ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `None` lets the grid method pick a step from the upper bound.
    pub grid_step: Option<f64>,
    pub quad_tol: f64,
    pub k_scan_patience: u64,
    pub output: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid_step: None,
            quad_tol: 1e-10,
            k_scan_patience: DEFAULT_PATIENCE,
            output: OutputFormat::Markdown,
        }
    }
}

/// Flag values that override the file; `None` means not given.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub grid_step: Option<f64>,
    pub quad_tol: Option<f64>,
    pub k_scan_patience: Option<u64>,
    pub output: Option<OutputFormat>,
}

fn check_positive(key: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::invalid(format!(
            "{key} must be a positive number, got {v}"
        )))
    }
}

fn positive(key: &str, value: &str) -> Result<f64, Failure> {
    let v = value
        .parse::<f64>()
        .map_err(|_| Failure::invalid(format!("{key} must be a positive number, got {value:?}")))?;
    check_positive(key, v)
}

impl RunConfig {
    pub fn load(path: Option<&Path>, flags: &Overrides) -> Result<Self, Failure> {
        let mut cfg = RunConfig::default();
        if let Some(path) = path {
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::invalid(format!("cannot read config {}: {e}", path.display()))
            })?;
            cfg.apply_file(&text)
                .map_err(|e| Failure::invalid(format!("{}: {}", path.display(), e.message())))?;
        }
        if let Some(v) = flags.grid_step {
            cfg.grid_step = Some(check_positive("grid step", v)?);
        }
        if let Some(v) = flags.quad_tol {
            cfg.quad_tol = check_positive("quadrature tolerance", v)?;
        }
        if let Some(v) = flags.k_scan_patience {
            cfg.k_scan_patience = v;
        }
        if let Some(v) = flags.output {
            cfg.output = v;
        }
        if cfg.k_scan_patience == 0 {
            return Err(Failure::invalid("k-scan patience must be at least 1"));
        }
        Ok(cfg)
    }

    fn apply_file(&mut self, text: &str) -> Result<(), Failure> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::invalid(format!(
                    "line {}: expected key=value",
                    n + 1
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "grid_step" => self.grid_step = Some(positive(key, value)?),
                "quad_tol" => self.quad_tol = positive(key, value)?,
                "k_scan_patience" => {
                    self.k_scan_patience = value.parse().map_err(|_| {
                        Failure::invalid(format!("line {}: bad k_scan_patience {value:?}", n + 1))
                    })?
                }
                "output" | "format" => {
                    self.output = OutputFormat::parse(value).ok_or_else(|| {
                        Failure::invalid(format!("line {}: unknown output format {value:?}", n + 1))
                    })?
                }
                other => {
                    return Err(Failure::invalid(format!(
                        "line {}: unknown key {other:?}",
                        n + 1
                    )))
                }
            }
        }
        Ok(())
    }
}
