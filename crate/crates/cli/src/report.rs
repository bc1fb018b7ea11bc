//! Plain-text fit report: `key = value` lines, readable by people and by the
//! `collapse` command.

use std::fmt::Write as _;
use std::path::Path;

use bec_entanglement::scaling::{critical_exponents, fit_power_law};
use bec_entanglement::sweep::CriticalPoint;
use bec_entanglement::{Exponents, PowerLawFit};

use crate::csvio::fmt_float;
use crate::error::{CliError, Result};

pub const FIT_REPORT_FILE: &str = "fit_report.txt";

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub points: usize,
    /// `Ω_m(N)`.
    pub omega_fit: PowerLawFit,
    /// `χ_m(N)`, the peak susceptibility.
    pub chi_fit: PowerLawFit,
    pub exponents: Exponents,
}

impl FitReport {
    pub fn from_critical(points: &[CriticalPoint]) -> Result<Self> {
        let n = |c: &CriticalPoint| f64::from(c.n_particles.get());
        let omega: Vec<(f64, f64)> = points.iter().map(|c| (n(c), c.omega_m)).collect();
        let chi: Vec<(f64, f64)> = points.iter().map(|c| (n(c), c.peak_susceptibility)).collect();
        let omega_fit = fit_power_law(&omega)?;
        let chi_fit = fit_power_law(&chi)?;
        let exponents = critical_exponents(&omega_fit, &chi_fit)?;
        Ok(Self {
            points: points.len(),
            omega_fit,
            chi_fit,
            exponents,
        })
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# power-law fits of critical points: value = prefactor * N^exponent");
        let _ = writeln!(s, "points = {}", self.points);
        for (name, fit) in [("omega_m", &self.omega_fit), ("peak_susceptibility", &self.chi_fit)] {
            let _ = writeln!(s, "{name}.prefactor = {}", fmt_float(fit.prefactor));
            let _ = writeln!(s, "{name}.exponent = {}", fmt_float(fit.exponent));
            let _ = writeln!(s, "{name}.rms_log_residual = {}", fmt_float(fit.rms_log_residual));
        }
        let _ = writeln!(s, "nu = {}", fmt_float(self.exponents.nu));
        let _ = writeln!(s, "gamma = {}", fmt_float(self.exponents.gamma));
        s
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut values = std::collections::HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| CliError::Parse {
                path: path.to_path_buf(),
                line: i as u64 + 1,
                message: format!("expected `key = value`, got {line:?}"),
            })?;
            let v: f64 = v.trim().parse().map_err(|_| CliError::Parse {
                path: path.to_path_buf(),
                line: i as u64 + 1,
                message: format!("not a number: {:?}", v.trim()),
            })?;
            values.insert(k.trim().to_string(), v);
        }
        let get = |k: &str| {
            values.get(k).copied().ok_or_else(|| {
                CliError::input(format!("{}: missing key {k}", path.display()))
            })
        };
        let fit = |prefix: &str| -> Result<PowerLawFit> {
            Ok(PowerLawFit {
                prefactor: get(&format!("{prefix}.prefactor"))?,
                exponent: get(&format!("{prefix}.exponent"))?,
                rms_log_residual: get(&format!("{prefix}.rms_log_residual"))?,
            })
        };
        Ok(Self {
            points: get("points")? as usize,
            omega_fit: fit("omega_m")?,
            chi_fit: fit("peak_susceptibility")?,
            exponents: Exponents {
                nu: get("nu")?,
                gamma: get("gamma")?,
            },
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }
}
