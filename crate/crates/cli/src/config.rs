//! Run configuration: a flat TOML file, command-line overrides, and one
//! environment variable for the default output directory.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bec_entanglement::sweep::linear_grid;
use bec_entanglement::{CouplingConvention, SystemSize};
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "BEC_QPT_OUT";
pub const DEFAULT_OUT_DIR: &str = "results";

/// System sizes of the susceptibility figure.
pub const FIGURE_SIZES: [u32; 6] = [240, 400, 700, 1000, 2100, 2700];
/// System sizes of the delay table.
pub const DELAY_SIZES: [u32; 6] = [200, 400, 600, 800, 1600, 2700];

/// Finite-difference step `h = c / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRule {
    pub constant: f64,
}

impl StepRule {
    pub fn step(&self, n: SystemSize) -> f64 {
        self.constant / f64::from(n.get())
    }
}

impl Default for StepRule {
    fn default() -> Self {
        Self {
            constant: bec_entanglement::sweep::DEFAULT_STEP_CONSTANT,
        }
    }
}

impl FromStr for StepRule {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || CliError::input(format!("step rule must look like \"c/N\", got {s:?}"));
        let (c, denom) = s.trim().split_once('/').ok_or_else(bad)?;
        if denom.trim() != "N" {
            return Err(bad());
        }
        let constant: f64 = c.trim().parse().map_err(|_| bad())?;
        if !(constant > 0.0) || !constant.is_finite() {
            return Err(bad());
        }
        Ok(Self { constant })
    }
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/N", self.constant)
    }
}

/// Keys accepted in the config file; every key is optional. The same shape
/// carries command-line overrides.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub sizes: Option<Vec<u32>>,
    pub bracket: Option<[f64; 2]>,
    pub resolution: Option<f64>,
    pub step_rule: Option<String>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub convention: Option<String>,
    pub scan_points: Option<usize>,
    /// Upper end of the default scan grid, as `N·Ω`.
    pub scan_reduced_max: Option<f64>,
    /// Explicit scan grid; overrides `scan_points`/`scan_reduced_max`.
    pub grid: Option<Vec<f64>>,
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merged(self, over: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            sizes: over.sizes.or(self.sizes),
            bracket: over.bracket.or(self.bracket),
            resolution: over.resolution.or(self.resolution),
            step_rule: over.step_rule.or(self.step_rule),
            out: over.out.or(self.out),
            threads: over.threads.or(self.threads),
            convention: over.convention.or(self.convention),
            scan_points: over.scan_points.or(self.scan_points),
            scan_reduced_max: over.scan_reduced_max.or(self.scan_reduced_max),
            grid: over.grid.or(self.grid),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Sorted, deduplicated; `None` selects the command's default set.
    pub sizes: Option<Vec<SystemSize>>,
    pub bracket: (f64, f64),
    /// Whether `bracket` was set by the user rather than defaulted.
    pub bracket_explicit: bool,
    pub target_resolution: f64,
    pub step_rule: StepRule,
    pub output_dir: PathBuf,
    pub threads: usize,
    pub convention: CouplingConvention,
    pub scan_points: usize,
    pub scan_reduced_max: f64,
    pub grid: Option<Vec<f64>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sizes: None,
            bracket: (1e-6, 1e-2),
            bracket_explicit: false,
            target_resolution: 1e-10,
            step_rule: StepRule::default(),
            output_dir: PathBuf::from(DEFAULT_OUT_DIR),
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            convention: CouplingConvention::PairHopping,
            scan_points: 401,
            scan_reduced_max: 2.0,
            grid: None,
        }
    }
}

fn sizes_from(raw: &[u32]) -> Result<Vec<SystemSize>> {
    let mut sizes = raw
        .iter()
        .map(|&n| SystemSize::new(n).map_err(CliError::from))
        .collect::<Result<Vec<_>>>()?;
    sizes.sort();
    sizes.dedup();
    if sizes.is_empty() {
        return Err(CliError::input("size list is empty"));
    }
    Ok(sizes)
}

impl RunConfig {
    /// Defaults, then `env_out_dir`, then the file layer, then overrides.
    pub fn from_layer(layer: ConfigLayer, env_out_dir: Option<PathBuf>) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(dir) = env_out_dir {
            cfg.output_dir = dir;
        }
        if let Some(raw) = layer.sizes {
            cfg.sizes = Some(sizes_from(&raw)?);
        }
        if let Some([lo, hi]) = layer.bracket {
            cfg.bracket = (lo, hi);
            cfg.bracket_explicit = true;
        }
        if let Some(r) = layer.resolution {
            cfg.target_resolution = r;
        }
        if let Some(rule) = layer.step_rule {
            cfg.step_rule = rule.parse()?;
        }
        if let Some(out) = layer.out {
            cfg.output_dir = out;
        }
        if let Some(t) = layer.threads {
            cfg.threads = t;
        }
        if let Some(c) = layer.convention {
            cfg.convention = c.parse()?;
        }
        if let Some(p) = layer.scan_points {
            cfg.scan_points = p;
        }
        if let Some(m) = layer.scan_reduced_max {
            cfg.scan_reduced_max = m;
        }
        cfg.grid = layer.grid;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `file` (if any) and applies `overrides` and the environment.
    pub fn load(file: Option<&Path>, overrides: ConfigLayer) -> Result<Self> {
        let base = match file {
            Some(path) => ConfigLayer::from_file(path)?,
            None => ConfigLayer::default(),
        };
        let env_out = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
        Self::from_layer(base.merged(overrides), env_out)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bracket;
        if !(lo >= 0.0) || !(hi > lo) || !hi.is_finite() {
            return Err(CliError::input(format!(
                "bracket must satisfy 0 <= lo < hi, got [{lo}, {hi}]"
            )));
        }
        if !(self.target_resolution > 0.0) || !self.target_resolution.is_finite() {
            return Err(CliError::input(format!(
                "resolution must be positive, got {}",
                self.target_resolution
            )));
        }
        if self.threads == 0 {
            return Err(CliError::input("threads must be at least 1"));
        }
        if self.scan_points == 0 {
            return Err(CliError::input("scan_points must be at least 1"));
        }
        if !(self.scan_reduced_max > 0.0) || !self.scan_reduced_max.is_finite() {
            return Err(CliError::input("scan_reduced_max must be positive"));
        }
        if let Some(grid) = &self.grid {
            if grid.is_empty() {
                return Err(CliError::input("grid is empty"));
            }
            if grid.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
                return Err(CliError::input("grid values must be finite and non-negative"));
            }
            if grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::input("grid must be strictly increasing"));
            }
        }
        Ok(())
    }

    /// Configured sizes, or `default` when none were given.
    pub fn sizes_or(&self, default: &[u32]) -> Vec<SystemSize> {
        match &self.sizes {
            Some(s) => s.clone(),
            None => sizes_from(default).expect("built-in size sets are valid"),
        }
    }

    /// Scan grid for `n`: the explicit grid, or `scan_points` uniform points
    /// on `[0, min(hi, scan_reduced_max / N)]`.
    pub fn scan_grid(&self, n: SystemSize) -> Vec<f64> {
        if let Some(grid) = &self.grid {
            return grid.clone();
        }
        let upper = self
            .bracket
            .1
            .min(self.scan_reduced_max / f64::from(n.get()));
        linear_grid(0.0, upper, self.scan_points)
    }
}
