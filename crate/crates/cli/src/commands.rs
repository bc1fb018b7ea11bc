//! The six pipeline commands. Each runs inside a rayon pool sized by the
//! configuration and writes its results under the output directory.

use std::path::{Path, PathBuf};

use bec_entanglement::scaling::{calibrated_collapse_threshold, data_collapse, CollapsePlot};
use bec_entanglement::spectral::solve_point;
use bec_entanglement::sweep::{
    default_bracket, find_peak_with, measure_delay_with, sweep, CriticalPoint, DelayRecord,
    PeakOptions, SweepCurve,
};
use bec_entanglement::truncation::{
    published_critical_line, truncated_entropy, truncated_raw_entropy, truncated_state,
    truncated_susceptibility_exponent,
};
use bec_entanglement::{CouplingConvention, SystemSize};
use rayon::prelude::*;

use crate::config::{RunConfig, DELAY_SIZES, FIGURE_SIZES};
use crate::csvio;
use crate::error::{CliError, Result};
use crate::report::{FitReport, FIT_REPORT_FILE};

fn with_pool<R: Send>(cfg: &RunConfig, job: impl FnOnce() -> Result<R> + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::input(format!("cannot start {} threads: {e}", cfg.threads)))?;
    pool.install(job)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn peak_options(cfg: &RunConfig, n: SystemSize) -> PeakOptions {
    PeakOptions::new(cfg.convention).derivative_step(cfg.step_rule.step(n))
}

/// Samples every configured size on its scan grid and writes `sweep_N*.csv`.
pub fn cmd_scan(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let sizes = cfg.sizes_or(&FIGURE_SIZES);
    ensure_dir(&cfg.output_dir)?;
    let curves = with_pool(cfg, || {
        sizes
            .iter()
            .map(|&n| Ok(sweep(n, &cfg.scan_grid(n), cfg.step_rule.step(n), cfg.convention)?))
            .collect::<Result<Vec<_>>>()
    })?;
    curves
        .iter()
        .map(|c| csvio::write_sweep(&cfg.output_dir, c))
        .collect()
}

/// Critical points of every size without writing anything.
pub fn locate_critical(cfg: &RunConfig, sizes: &[SystemSize]) -> Result<Vec<CriticalPoint>> {
    with_pool(cfg, || {
        sizes
            .par_iter()
            .map(|&n| {
                Ok(find_peak_with(
                    n,
                    cfg.bracket,
                    cfg.target_resolution,
                    &peak_options(cfg, n),
                )?)
            })
            .collect()
    })
}

/// Locates `Ω_m` and `χ_m` for every size and writes `critical.csv`.
pub fn cmd_critical(cfg: &RunConfig) -> Result<(PathBuf, Vec<CriticalPoint>)> {
    let sizes = cfg.sizes_or(&FIGURE_SIZES);
    ensure_dir(&cfg.output_dir)?;
    let points = locate_critical(cfg, &sizes)?;
    let path = cfg.output_dir.join(csvio::CRITICAL_FILE);
    csvio::write_critical(&path, &points)?;
    Ok((path, points))
}

/// Fits power laws to a critical-point file and writes `fit_report.txt`.
pub fn cmd_fit(critical_csv: &Path, out_dir: &Path) -> Result<(PathBuf, FitReport)> {
    let points = csvio::read_critical(critical_csv)?;
    if points.len() < 3 {
        return Err(CliError::input(format!(
            "{}: fitting needs at least 3 rows, found {}",
            critical_csv.display(),
            points.len()
        )));
    }
    let report = FitReport::from_critical(&points)?;
    ensure_dir(out_dir)?;
    let path = out_dir.join(FIT_REPORT_FILE);
    std::fs::write(&path, report.render()).map_err(|e| CliError::io(&path, e))?;
    Ok((path, report))
}

#[derive(Debug, Clone)]
pub struct CollapseSummary {
    pub path: PathBuf,
    pub plot: CollapsePlot,
    /// Score with the fitted `ν` and `a`.
    pub score: f64,
    /// Score with `ν` doubled, everything else unchanged.
    pub doubled_nu_score: f64,
    /// Noise-calibrated absolute threshold for `score`.
    pub threshold: f64,
}

/// Rescales the sweep files with the fitted exponents and writes
/// `collapse.csv`.
pub fn cmd_collapse(cfg: &RunConfig, critical_csv: &Path, fit_report: &Path) -> Result<CollapseSummary> {
    let criticals = csvio::read_critical(critical_csv)?;
    let report = FitReport::read(fit_report)?;
    let sizes = match &cfg.sizes {
        Some(s) => s.clone(),
        None => criticals.iter().map(|c| c.n_particles).collect(),
    };
    let curves = sizes
        .iter()
        .map(|&n| {
            csvio::read_sweep(
                &cfg.output_dir.join(csvio::sweep_file_name(n)),
                n,
                cfg.convention,
            )
        })
        .collect::<Result<Vec<SweepCurve>>>()?;
    let nu = report.exponents.nu;
    let a = report.chi_fit.exponent;
    let plot = data_collapse(&curves, &criticals, nu, a)?;
    let doubled = data_collapse(&curves, &criticals, 2.0 * nu, a)?;
    let threshold = calibrated_collapse_threshold(&plot);
    let path = cfg.output_dir.join(csvio::COLLAPSE_FILE);
    csvio::write_collapse(&path, &plot)?;
    Ok(CollapseSummary {
        path,
        score: plot.collapse_score,
        doubled_nu_score: doubled.collapse_score,
        threshold,
        plot,
    })
}

/// Measures the entropy-to-fluctuation peak delay for every size and writes
/// `delay.csv`.
pub fn cmd_delay(cfg: &RunConfig) -> Result<(PathBuf, Vec<DelayRecord>)> {
    let sizes = cfg.sizes_or(&DELAY_SIZES);
    ensure_dir(&cfg.output_dir)?;
    let records = with_pool(cfg, || {
        sizes
            .par_iter()
            .map(|&n| {
                let bracket = if cfg.bracket_explicit {
                    cfg.bracket
                } else {
                    default_bracket(n, cfg.convention)
                };
                Ok(measure_delay_with(
                    n,
                    bracket,
                    cfg.target_resolution,
                    &peak_options(cfg, n),
                )?)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let path = cfg.output_dir.join(csvio::DELAY_FILE);
    csvio::write_delay(&path, &records)?;
    Ok((path, records))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl OracleCheck {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }

    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {}: {}", self.name, self.detail)
    }
}

/// Sizes of the small-coupling comparison against exact diagonalization.
pub const ORACLE_COMPARE_SIZES: [u32; 3] = [100, 400, 1000];
/// Fractions of `Ω_m` at which the comparison is made.
pub const ORACLE_COMPARE_FRACTIONS: [f64; 3] = [0.1, 0.05, 0.01];
/// Sizes of the truncated-susceptibility exponent fit.
pub const ORACLE_EXPONENT_SIZES: [u32; 3] = [10_000, 100_000, 1_000_000];
pub const ORACLE_EXPONENT_RANGE: (f64, f64) = (0.94, 1.0);

/// Cross-checks the three-state truncation against exact diagonalization and
/// its own closed form. Couplings are on the spin-operator axis.
pub fn cmd_verify_oracle(cfg: &RunConfig) -> Result<Vec<OracleCheck>> {
    with_pool(cfg, oracle_checks)
}

fn oracle_checks() -> Result<Vec<OracleCheck>> {
    let spin = CouplingConvention::SpinOperator;
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for n in [4, 100, 1000, 2700] {
        let n = SystemSize::new(n)?;
        let (_, exact) = solve_point(n, 0.0f64, spin)?;
        worst = worst.max(exact.entropy.abs());
        worst = worst.max(truncated_entropy(&truncated_state(n, 0.0f64)?, n).abs());
    }
    checks.push(OracleCheck::new(
        "zero-coupling entropy",
        worst == 0.0,
        format!("max |S| = {worst:e} over N in {{4, 100, 1000, 2700}}"),
    ));

    let n = SystemSize::new(1000)?;
    let state = truncated_state(n, 0.002f64)?;
    let p1 = 0.25 * (1.0 - 1.0 / 3f64.sqrt());
    let p0 = 1.0 - 2.0 * p1;
    let reference = (-p0 * p0.log2() - 2.0 * p1 * p1.log2()) / 1001f64.log2();
    let got = truncated_entropy(&state, n);
    checks.push(OracleCheck::new(
        "closed-form entropy at N=1000, omega=0.002",
        (got - reference).abs() <= 1e-12 && (got - 0.0958474).abs() <= 1e-6,
        format!(
            "S = {got:.9} (raw {:.9} bits), reference {reference:.9}",
            truncated_raw_entropy(&state)
        ),
    ));

    let mut max_c1_sq = 0.0f64;
    for n in [4, 100, 1000, 1_000_000] {
        let n = SystemSize::new(n)?;
        for k in -8..=4 {
            let omega = 10f64.powi(k);
            max_c1_sq = max_c1_sq.max(truncated_state(n, omega)?.c1_sq());
        }
    }
    checks.push(OracleCheck::new(
        "root choice c1^2 <= 1/4",
        max_c1_sq <= 0.25,
        format!("max c1^2 = {max_c1_sq:.12}"),
    ));

    let sizes: Vec<SystemSize> = ORACLE_COMPARE_SIZES
        .iter()
        .map(|&n| SystemSize::new(n))
        .collect::<std::result::Result<_, _>>()?;
    let comparisons = sizes
        .par_iter()
        .map(|&n| {
            let big_n = f64::from(n.get());
            let peak = find_peak_with(
                n,
                default_bracket(n, spin),
                1e-4 / big_n,
                &PeakOptions::new(spin),
            )?;
            ORACLE_COMPARE_FRACTIONS
                .iter()
                .map(|&frac| {
                    let omega = frac * peak.omega_m;
                    let (coeffs, exact) = solve_point(n, omega, spin)?;
                    let trunc = truncated_state(n, omega)?;
                    let ds = (truncated_entropy(&trunc, n) - exact.entropy).abs() / exact.entropy;
                    let de = (trunc.energy - coeffs.energy).abs() / coeffs.energy.abs();
                    Ok((ds, de))
                })
                .collect::<bec_entanglement::Result<Vec<_>>>()
        })
        .collect::<bec_entanglement::Result<Vec<_>>>()?;
    let (ds, de) = comparisons
        .iter()
        .flatten()
        .fold((0.0f64, 0.0f64), |(a, b), &(x, y)| (a.max(x), b.max(y)));
    checks.push(OracleCheck::new(
        "truncated vs exact entropy below omega_m/10",
        ds <= 0.05,
        format!("max relative deviation {ds:.3e} (limit 5e-2)"),
    ));
    checks.push(OracleCheck::new(
        "truncated vs exact energy below omega_m/10",
        de <= 0.10,
        format!("max relative deviation {de:.3e} (limit 1e-1)"),
    ));

    let sizes: Vec<SystemSize> = ORACLE_EXPONENT_SIZES
        .iter()
        .map(|&n| SystemSize::new(n))
        .collect::<std::result::Result<_, _>>()?;
    let exponent: f64 = truncated_susceptibility_exponent(&sizes, published_critical_line)?;
    let (lo, hi) = ORACLE_EXPONENT_RANGE;
    checks.push(OracleCheck::new(
        "truncated susceptibility exponent on the critical line",
        (lo..=hi).contains(&exponent),
        format!("exponent {exponent:.5} for N in {{1e4, 1e5, 1e6}}, expected [{lo}, {hi}]"),
    ));
    Ok(checks)
}

/// `Err(Verification)` naming the failed checks, if any.
pub fn verification_outcome(checks: &[OracleCheck]) -> Result<()> {
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join("; ")))
    }
}
