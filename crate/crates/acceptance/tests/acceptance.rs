//! Acceptance run: every criterion is evaluated at its stated tolerance and
//! reported on one line. Exits non-zero if any criterion fails.
//!
//! Criteria 1 to 5 and 8 run the same command implementations as the
//! `bec-qpt` binary with the default configuration.

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use bec_cli::commands::{cmd_collapse, cmd_critical, cmd_delay, cmd_fit, cmd_scan};
use bec_cli::config::RunConfig;
use bec_cli::csvio::{read_sweep, sweep_file_name, COLLAPSE_FILE};
use bec_cli::report::FitReport;
use bec_entanglement::scaling::{data_collapse, fit_power_law};
use bec_entanglement::spectral::{
    build_hamiltonian, entanglement_entropy, ground_state, jz_moments, solve_point, Coupling,
};
use bec_entanglement::sweep::SweepCurve;
use bec_entanglement::truncation::{published_critical_line, truncated_susceptibility_exponent};
use bec_entanglement::{CouplingConvention, SystemSize};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Table of peak delays: `(N, ΔΩ)`.
const DELAY_TABLE: [(u32, f64); 6] = [
    (200, 0.000675),
    (400, 0.000375),
    (600, 0.000263),
    (800, 0.000188),
    (1600, 0.000075),
    (2700, 0.000055),
];

struct Outcome {
    id: &'static str,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn report(out: &Outcome) {
    let tag = if out.passed { "PASS" } else { "FAIL" };
    println!("{tag} [{}] {}: {}", out.id, out.name, out.detail);
    let _ = std::io::stdout().flush();
}

fn rel(got: f64, expected: f64) -> f64 {
    (got - expected) / expected
}

fn size(n: u32) -> SystemSize {
    SystemSize::new(n).unwrap()
}

/// Shared outputs of the `critical` + `fit` run.
struct Pipeline {
    cfg: RunConfig,
    fit: FitReport,
}

fn run_pipeline(dir: &Path) -> Result<Pipeline, String> {
    let cfg = RunConfig {
        output_dir: dir.to_path_buf(),
        ..RunConfig::default()
    };
    let (critical_csv, _) = cmd_critical(&cfg).map_err(|e| e.to_string())?;
    let (_, fit) = cmd_fit(&critical_csv, dir).map_err(|e| e.to_string())?;
    Ok(Pipeline { cfg, fit })
}

fn criterion_1(p: &Pipeline) -> Outcome {
    let f = &p.fit.omega_fit;
    let db = f.exponent - -0.989;
    let da = rel(f.prefactor, 0.319225);
    Outcome {
        id: "1",
        name: "critical-point scaling",
        passed: db.abs() <= 0.02 && da.abs() <= 0.05,
        detail: format!(
            "Omega_m = {:.6} N^{:.6}; exponent off by {db:+.4} (limit 0.02), prefactor off by {:+.2}% (limit 5%)",
            f.prefactor,
            f.exponent,
            100.0 * da
        ),
    }
}

fn criterion_2(p: &Pipeline) -> Outcome {
    let f = &p.fit.chi_fit;
    let db = f.exponent - 0.847;
    let da = rel(f.prefactor, 0.393037);
    Outcome {
        id: "2",
        name: "susceptibility divergence",
        passed: db.abs() <= 0.02 && da.abs() <= 0.10,
        detail: format!(
            "chi_m = {:.6} N^{:.6}; exponent off by {db:+.4} (limit 0.02), prefactor off by {:+.2}% (limit 10%)",
            f.prefactor,
            f.exponent,
            100.0 * da
        ),
    }
}

fn criterion_3(p: &Pipeline) -> Outcome {
    let e = &p.fit.exponents;
    Outcome {
        id: "3",
        name: "critical exponents",
        passed: (0.98..=1.04).contains(&e.nu) && (0.83..=0.89).contains(&e.gamma),
        detail: format!("nu = {:.5} (range [0.98, 1.04]), gamma = {:.5} (range [0.83, 0.89])", e.nu, e.gamma),
    }
}

fn criterion_4(p: &Pipeline) -> Outcome {
    let dir = &p.cfg.output_dir;
    let run = cmd_scan(&p.cfg).and_then(|_| {
        cmd_collapse(&p.cfg, &dir.join("critical.csv"), &dir.join("fit_report.txt"))
    });
    match run {
        Ok(s) => {
            let ratio = s.doubled_nu_score / s.score;
            Outcome {
                id: "4",
                name: "data collapse",
                passed: ratio >= 10.0 && dir.join(COLLAPSE_FILE).exists(),
                detail: format!(
                    "score {:.4e} with fitted exponents, {:.4e} with nu doubled (ratio {ratio:.1}, need >= 10); \
                     calibrated threshold {:.4e} recorded",
                    s.score, s.doubled_nu_score, s.threshold
                ),
            }
        }
        Err(e) => failed("4", "data collapse", e),
    }
}

fn criterion_5(p: &Pipeline) -> Outcome {
    let name = "delay table";
    let records = match cmd_delay(&p.cfg) {
        Ok((_, r)) => r,
        Err(e) => return failed("5", name, e),
    };
    let mut within = true;
    let mut parts = Vec::new();
    for (rec, &(n, expected)) in records.iter().zip(&DELAY_TABLE) {
        assert_eq!(rec.n_particles.get(), n);
        let res = rec.entropy_peak.resolution.max(rec.fluctuation_peak.resolution);
        let err = (rec.delta_omega - expected).abs();
        let ok = err <= (0.15 * expected).max(2.0 * res);
        within &= ok;
        parts.push(format!(
            "N={n}: {:.3e} vs {expected:.3e} ({:+.0}%)",
            rec.delta_omega,
            100.0 * rel(rec.delta_omega, expected)
        ));
    }
    let decreasing = records.windows(2).all(|w| w[1].delta_omega < w[0].delta_omega);
    Outcome {
        id: "5",
        name,
        passed: within && decreasing,
        detail: format!(
            "{}; within 15%: {within}; strictly decreasing: {decreasing}",
            parts.join(", ")
        ),
    }
}

fn criterion_6() -> Outcome {
    let sizes = [10_000, 100_000, 1_000_000].map(size);
    match truncated_susceptibility_exponent::<f64, _>(&sizes, published_critical_line) {
        Ok(e) => Outcome {
            id: "6",
            name: "truncation exponent",
            passed: (0.94..=1.0).contains(&e),
            detail: format!("exponent {e:.5} along the critical line for N in {{1e4, 1e5, 1e6}} (range [0.94, 1.0])"),
        },
        Err(e) => failed("6", "truncation exponent", e),
    }
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();

    // ground-state invariants on random (N, Ω)
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let n = size(2 * rng.gen_range(1..=200));
        let omega = 10f64.powf(rng.gen_range(-6.0..2.0));
        let h = build_hamiltonian(n, Coupling::new(omega).unwrap());
        let c = match ground_state(&h) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("solve N={n} Omega={omega:e}: {e}"));
                continue;
            }
        };
        let a = &c.amplitudes;
        let parity = (0..a.len()).map(|k| (a[k] - a[a.len() - 1 - k]).abs()).fold(0.0, f64::max);
        let mean = jz_moments(&c, n).mean.abs();
        let resid = c.residual(&h) / c.energy.abs().max(1.0);
        if (c.norm_sq() - 1.0).abs() > 1e-12 || parity > 1e-10 || mean > 1e-10 || resid > 1e-10 {
            failures.push(format!("invariants N={n} Omega={omega:e}"));
        }
    }

    // dense brute force
    for n in [2, 4, 6, 8].map(size) {
        for omega in [0.0, 0.1, 1.0, 10.0] {
            let h = build_hamiltonian(n, Coupling::new(omega).unwrap());
            let dense = h.to_dense();
            let m = DMatrix::from_fn(h.dim(), h.dim(), |i, j| dense[i][j]);
            let eig = m.symmetric_eigen();
            let k = eig.eigenvalues.imin();
            let s_dense = -eig
                .eigenvectors
                .column(k)
                .iter()
                .map(|v: &f64| v * v)
                .filter(|&p| p > 0.0)
                .map(|p| p * p.log2())
                .sum::<f64>()
                / n.max_entropy_bits::<f64>();
            let c = ground_state(&h).unwrap();
            if (c.energy - eig.eigenvalues[k]).abs() > 1e-9 || (entanglement_entropy(&c, n) - s_dense).abs() > 1e-9 {
                failures.push(format!("dense oracle N={n} Omega={omega}"));
            }
        }
    }

    // synthetic power laws
    for a in [1e-3, 0.319225, 1e3] {
        for b in [-3.0, -0.989062, 0.5, 3.0] {
            let pts: Vec<(f64, f64)> = [10.0, 100.0, 1000.0, 10_000.0]
                .iter()
                .map(|&n: &f64| (n, a * n.powf(b)))
                .collect();
            let fit = fit_power_law(&pts).unwrap();
            if (fit.exponent - b).abs() > 1e-12 || rel(fit.prefactor, a).abs() > 1e-12 || fit.rms_log_residual > 1e-12 {
                failures.push(format!("power law A={a} b={b}"));
            }
        }
    }

    // binomial limit
    let c = ground_state(&build_hamiltonian(size(20), Coupling::new(2e5).unwrap())).unwrap();
    let mut binom = 1.0f64;
    let mut worst = 0.0f64;
    for (k, &amp) in c.amplitudes.iter().enumerate() {
        worst = worst.max((amp - (binom / 2f64.powi(20)).sqrt()).abs());
        binom *= (20 - k) as f64 / (k + 1) as f64;
    }
    if worst > 1e-3 {
        failures.push(format!("binomial limit off by {worst:e}"));
    }

    // zero coupling
    for n in [2, 100, 2700].map(size) {
        let (_, obs) = solve_point(n, 0.0f64, CouplingConvention::SpinOperator).unwrap();
        if obs.entropy != 0.0 {
            failures.push(format!("entropy at zero coupling N={n}: {:e}", obs.entropy));
        }
    }

    Outcome {
        id: "7",
        name: "property suite",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!(
                "50 random ground states, dense oracle N <= 8, 12 synthetic power laws, \
                 binomial limit (max deviation {worst:.2e}), zero-coupling entropy"
            )
        } else {
            failures.join("; ")
        },
    }
}

fn criterion_8(p: &Pipeline) -> Outcome {
    let name = "entropy continuity at N=2700";
    let n = size(2700);
    let path = p.cfg.output_dir.join(sweep_file_name(n));
    let curve = match read_sweep(&path, n, p.cfg.convention) {
        Ok(c) => c,
        Err(e) => return failed("8", name, e),
    };
    let s = &curve.samples;
    let mut worst_ratio = 0.0f64;
    let mut continuous = true;
    let mut monotone = true;
    for w in s.windows(2) {
        let jump = w[1].entropy - w[0].entropy;
        let step = w[1].omega - w[0].omega;
        let slope = w[0].susceptibility.abs().max(w[1].susceptibility.abs());
        let bound = 10.0 * step * slope;
        if jump.abs() >= bound && jump != 0.0 {
            continuous = false;
        }
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(jump.abs() / (step * slope));
        }
        monotone &= jump >= 0.0;
    }
    Outcome {
        id: "8",
        name,
        passed: continuous && monotone,
        detail: format!(
            "{} samples on [0, {:.3e}]; max jump / (step x slope) = {worst_ratio:.3} (limit 10); non-decreasing: {monotone}",
            s.len(),
            s.last().unwrap().omega
        ),
    }
}

/// Raw collapse score along the segment from `(2ν, 2a)` to `(ν, a)`.
fn segment_invariant(p: &Pipeline) -> Outcome {
    let name = "collapse score decreases from (2nu, 2a) to (nu, a)";
    let dir = &p.cfg.output_dir;
    let crit = match bec_cli::csvio::read_critical(&dir.join("critical.csv")) {
        Ok(c) => c,
        Err(e) => return failed("inv", name, e),
    };
    let curves: Vec<SweepCurve> = crit
        .iter()
        .map(|c| read_sweep(&dir.join(sweep_file_name(c.n_particles)), c.n_particles, p.cfg.convention).unwrap())
        .collect();
    let (nu, a) = (p.fit.exponents.nu, p.fit.chi_fit.exponent);
    let scores: Vec<f64> = (0..5)
        .map(|k| {
            let t = 2.0 - k as f64 / 4.0;
            data_collapse(&curves, &crit, t * nu, t * a).unwrap().collapse_score
        })
        .collect();
    Outcome {
        id: "inv",
        name,
        passed: scores.windows(2).all(|w| w[1] < w[0]),
        detail: format!(
            "scores {}",
            scores.iter().map(|s| format!("{s:.3e}")).collect::<Vec<_>>().join(" -> ")
        ),
    }
}

fn failed(id: &'static str, name: &'static str, e: impl std::fmt::Display) -> Outcome {
    Outcome {
        id,
        name,
        passed: false,
        detail: format!("run failed: {e}"),
    }
}

fn main() -> ExitCode {
    // keep `cargo test -- <filter>` and `--list` from running the whole suite
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    if let Some(filter) = args.iter().find(|a| !a.starts_with('-')) {
        if !"acceptance".contains(filter.as_str()) {
            return ExitCode::SUCCESS;
        }
    }

    let dir = tempfile::tempdir().expect("temporary directory");
    let mut outcomes = Vec::new();
    match run_pipeline(dir.path()) {
        Ok(p) => {
            for f in [criterion_1, criterion_2, criterion_3, criterion_4] {
                outcomes.push(f(&p));
                report(outcomes.last().unwrap());
            }
            outcomes.push(criterion_5(&p));
            report(outcomes.last().unwrap());
            outcomes.push(criterion_6());
            report(outcomes.last().unwrap());
            outcomes.push(criterion_7());
            report(outcomes.last().unwrap());
            outcomes.push(criterion_8(&p));
            report(outcomes.last().unwrap());
            outcomes.push(segment_invariant(&p));
            report(outcomes.last().unwrap());
        }
        Err(e) => {
            outcomes.push(failed("1-5,8", "critical + fit pipeline", &e));
            report(outcomes.last().unwrap());
            outcomes.push(criterion_6());
            report(outcomes.last().unwrap());
            outcomes.push(criterion_7());
            report(outcomes.last().unwrap());
        }
    }

    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!(
        "acceptance: {} passed, {} failed{}",
        outcomes.len() - failed.len(),
        failed.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(" ({})", failed.join(", "))
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
