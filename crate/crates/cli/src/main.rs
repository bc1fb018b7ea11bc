use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bec_cli::commands;
use bec_cli::config::{ConfigLayer, OUT_DIR_ENV};
use bec_cli::csvio::CRITICAL_FILE;
use bec_cli::report::FIT_REPORT_FILE;
use bec_cli::{CliError, Result, RunConfig};
use clap::{Args, Parser, Subcommand};

/// Entanglement and critical scaling of the two-mode Bose-Hubbard ground state.
#[derive(Parser)]
#[command(name = "bec-qpt", version)]
struct Cli {
    #[command(flatten)]
    opts: Options,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Options {
    /// TOML file with run settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Comma-separated even particle numbers.
    #[arg(long, global = true, value_delimiter = ',')]
    sizes: Option<Vec<u32>>,

    /// Search bracket for the coupling, as `lo,hi`.
    #[arg(long, global = true, value_delimiter = ',')]
    bracket: Option<Vec<f64>>,

    /// Target resolution of peak locations.
    #[arg(long, global = true)]
    resolution: Option<f64>,

    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,

    /// Coupling axis: `pair` or `spin`.
    #[arg(long, global = true)]
    convention: Option<String>,

    /// Finite-difference step rule, e.g. `0.001/N`.
    #[arg(long, global = true)]
    step_rule: Option<String>,

    /// Explicit comma-separated scan grid.
    #[arg(long, global = true, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample entropy and susceptibility curves.
    Scan,
    /// Locate the susceptibility peak for each size.
    Critical,
    /// Fit power laws to a critical-point file.
    Fit {
        /// Defaults to critical.csv in the output directory.
        critical: Option<PathBuf>,
    },
    /// Rescale the sweeps onto one curve.
    Collapse {
        #[arg(long)]
        critical: Option<PathBuf>,
        #[arg(long)]
        fit_report: Option<PathBuf>,
    },
    /// Measure the delay between entropy and fluctuation peaks.
    Delay,
    /// Check the three-state truncation against exact results.
    VerifyOracle,
}

impl Options {
    fn layer(&self) -> Result<ConfigLayer> {
        let bracket = match self.bracket.as_deref() {
            None => None,
            Some(&[lo, hi]) => Some([lo, hi]),
            Some(_) => return Err(CliError::input("--bracket takes exactly two values")),
        };
        Ok(ConfigLayer {
            sizes: self.sizes.clone(),
            bracket,
            resolution: self.resolution,
            step_rule: self.step_rule.clone(),
            out: self.out.clone(),
            threads: self.threads,
            convention: self.convention.clone(),
            grid: self.grid.clone(),
            ..Default::default()
        })
    }
}

fn or_default(path: &Option<PathBuf>, dir: &Path, name: &str) -> PathBuf {
    path.clone().unwrap_or_else(|| dir.join(name))
}

fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::load(cli.opts.config.as_deref(), cli.opts.layer()?)?;
    let dir = cfg.output_dir.clone();
    match cli.command {
        Command::Scan => {
            for path in commands::cmd_scan(&cfg)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Critical => {
            let (path, points) = commands::cmd_critical(&cfg)?;
            for c in &points {
                println!(
                    "N = {}: omega_m = {:e}, peak susceptibility = {:.6}",
                    c.n_particles, c.omega_m, c.peak_susceptibility
                );
            }
            println!("wrote {}", path.display());
        }
        Command::Fit { critical } => {
            let (path, report) =
                commands::cmd_fit(&or_default(&critical, &dir, CRITICAL_FILE), &dir)?;
            print!("{}", report.render());
            println!("wrote {}", path.display());
        }
        Command::Collapse {
            critical,
            fit_report,
        } => {
            let summary = commands::cmd_collapse(
                &cfg,
                &or_default(&critical, &dir, CRITICAL_FILE),
                &or_default(&fit_report, &dir, FIT_REPORT_FILE),
            )?;
            println!("collapse score = {:e}", summary.score);
            println!("score with doubled nu = {:e}", summary.doubled_nu_score);
            println!("calibrated threshold = {:e}", summary.threshold);
            println!("wrote {}", summary.path.display());
        }
        Command::Delay => {
            let (path, records) = commands::cmd_delay(&cfg)?;
            for d in &records {
                println!("N = {}: delta_omega = {:e}", d.n_particles, d.delta_omega);
            }
            println!("wrote {}", path.display());
        }
        Command::VerifyOracle => {
            let checks = commands::cmd_verify_oracle(&cfg)?;
            for c in &checks {
                println!("{}", c.line());
            }
            commands::verification_outcome(&checks)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
