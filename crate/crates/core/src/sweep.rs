//! Coupling sweeps, susceptibility peak search and the delay between the
//! entropy and fluctuation peaks.
//!
//! Derivatives are central differences with a step that scales as `1/N`;
//! at the `Ω = 0` boundary a forward difference is used instead. Independent
//! `(N, Ω)` solves run on the rayon pool; results are gathered in input order,
//! so output does not depend on the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{solve_point, CouplingConvention, Observables, SystemSize};

/// Constant `c` of the default derivative step `h = c / N`.
pub const DEFAULT_STEP_CONSTANT: f64 = 1e-3;
/// Samples per refinement round; each round shrinks the window tenfold.
pub const SAMPLES_PER_ROUND: usize = 21;
const MAX_ROUNDS: usize = 64;
/// Relative tolerance below which sample-to-sample wiggles count as noise
/// in the unimodality check.
const UNIMODAL_NOISE: f64 = 1e-9;

pub fn default_derivative_step(n: SystemSize) -> f64 {
    DEFAULT_STEP_CONSTANT / f64::from(n.get())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSample {
    pub omega: f64,
    pub entropy: f64,
    /// `dE/dΩ` of the normalized entropy.
    pub susceptibility: f64,
    pub jz_fluct: f64,
    /// `d(ΔJ_z)²/dΩ`.
    pub jz_fluct_deriv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub n_particles: SystemSize,
    pub convention: CouplingConvention,
    /// Strictly increasing in `omega`.
    pub samples: Vec<SweepSample>,
}

/// Location and height of a derivative maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub n_particles: SystemSize,
    pub omega_m: f64,
    pub peak_susceptibility: f64,
    /// Grid step of the final refinement round.
    pub resolution: f64,
}

/// Which derivative [`find_peak_with`] maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PeakObservable {
    /// `dE/dΩ`.
    #[default]
    Entropy,
    /// `d(ΔJ_z)²/dΩ`.
    Fluctuation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakOptions {
    pub convention: CouplingConvention,
    pub observable: PeakObservable,
    /// Finite-difference step; `None` means [`default_derivative_step`].
    pub derivative_step: Option<f64>,
}

impl PeakOptions {
    pub fn new(convention: CouplingConvention) -> Self {
        Self {
            convention,
            observable: PeakObservable::Entropy,
            derivative_step: None,
        }
    }

    pub fn observable(mut self, observable: PeakObservable) -> Self {
        self.observable = observable;
        self
    }

    pub fn derivative_step(mut self, h: f64) -> Self {
        self.derivative_step = Some(h);
        self
    }

    fn step_for(&self, n: SystemSize) -> f64 {
        self.derivative_step
            .unwrap_or_else(|| default_derivative_step(n))
    }
}

/// `Ω_peak(fluctuation) − Ω_peak(entropy)` for one size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayRecord {
    pub n_particles: SystemSize,
    pub delta_omega: f64,
    pub entropy_peak: CriticalPoint,
    pub fluctuation_peak: CriticalPoint,
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid(format!("derivative step must be positive, got {h}")));
    }
    Ok(())
}

fn measure(n: SystemSize, omega: f64, convention: CouplingConvention) -> Result<Observables<f64>> {
    solve_point(n, omega, convention).map(|(_, obs)| obs)
}

fn pick(obs: &Observables<f64>, which: PeakObservable) -> f64 {
    match which {
        PeakObservable::Entropy => obs.entropy,
        PeakObservable::Fluctuation => obs.jz_fluct,
    }
}

/// Derivative of one observable at `omega`.
pub fn derivative_at(
    n: SystemSize,
    omega: f64,
    h: f64,
    options: &PeakOptions,
) -> Result<f64> {
    check_step(h)?;
    let conv = options.convention;
    let up = pick(&measure(n, omega + h, conv)?, options.observable);
    if omega - h >= 0.0 {
        let down = pick(&measure(n, omega - h, conv)?, options.observable);
        Ok((up - down) / (2.0 * h))
    } else {
        let here = pick(&measure(n, omega, conv)?, options.observable);
        Ok((up - here) / h)
    }
}

/// Samples entropy, `(ΔJ_z)²` and both derivatives on `omega_grid`.
pub fn sweep(
    n: SystemSize,
    omega_grid: &[f64],
    derivative_step: f64,
    convention: CouplingConvention,
) -> Result<SweepCurve> {
    check_step(derivative_step)?;
    if omega_grid.is_empty() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    if omega_grid.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::invalid("sweep grid must be finite and non-negative"));
    }
    if omega_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("sweep grid must be strictly increasing"));
    }
    let h = derivative_step;
    let samples = omega_grid
        .par_iter()
        .map(|&omega| {
            let here = measure(n, omega, convention)?;
            let up = measure(n, omega + h, convention)?;
            let (ds, df) = if omega - h >= 0.0 {
                let down = measure(n, omega - h, convention)?;
                (
                    (up.entropy - down.entropy) / (2.0 * h),
                    (up.jz_fluct - down.jz_fluct) / (2.0 * h),
                )
            } else {
                ((up.entropy - here.entropy) / h, (up.jz_fluct - here.jz_fluct) / h)
            };
            Ok(SweepSample {
                omega,
                entropy: here.entropy,
                susceptibility: ds,
                jz_fluct: here.jz_fluct,
                jz_fluct_deriv: df,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepCurve {
        n_particles: n,
        convention,
        samples,
    })
}

/// Uniform grid of `count` points on `[lo, hi]` including both ends.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (count - 1) as f64;
    (0..count)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == count => hi,
            _ => (a + step * i as f64).exp(),
        })
        .collect()
}

/// Vertex of the parabola through three points, in coordinates local to the
/// middle one. `None` if the points are not strictly concave.
fn parabolic_vertex(p: [(f64, f64); 3]) -> Option<f64> {
    let (x1, y1) = p[1];
    let u0 = p[0].0 - x1;
    let u2 = p[2].0 - x1;
    let d0 = (p[0].1 - y1) / u0;
    let d2 = (p[2].1 - y1) / u2;
    let a = (d2 - d0) / (u2 - u0);
    if !(a < 0.0) {
        return None;
    }
    let b = d0 - a * u0;
    let u = -b / (2.0 * a);
    Some(x1 + u.clamp(u0, u2))
}

fn is_unimodal(values: &[f64], peak: usize) -> bool {
    let top = values[peak].abs();
    let tol = UNIMODAL_NOISE * top.max(f64::MIN_POSITIVE);
    let rising = values[..=peak].windows(2).all(|w| w[1] >= w[0] - tol);
    let falling = values[peak..].windows(2).all(|w| w[1] <= w[0] + tol);
    rising && falling
}

fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > values[best] { i } else { best })
}

/// Locates the maximum of `dE/dΩ` inside `bracket`.
pub fn find_peak(
    n: SystemSize,
    bracket: (f64, f64),
    target_resolution: f64,
    convention: CouplingConvention,
) -> Result<CriticalPoint> {
    find_peak_with(n, bracket, target_resolution, &PeakOptions::new(convention))
}

/// Coarse scan of the bracket followed by shrink-and-rescan rounds around the
/// running maximum, until the grid step and the round-to-round movement of
/// the estimate are both below `target_resolution`. The estimate of every
/// round is the vertex of the parabola through the three highest samples.
pub fn find_peak_with(
    n: SystemSize,
    bracket: (f64, f64),
    target_resolution: f64,
    options: &PeakOptions,
) -> Result<CriticalPoint> {
    let (lo, hi) = bracket;
    if !(lo >= 0.0) || !(hi > lo) || !hi.is_finite() {
        return Err(Error::invalid(format!(
            "bracket must satisfy 0 <= lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !(target_resolution > 0.0) {
        return Err(Error::invalid(format!(
            "target resolution must be positive, got {target_resolution}"
        )));
    }
    let h = options.step_for(n);
    check_step(h)?;
    let eval = |w: f64| derivative_at(n, w, h, options);

    let mut grid = if lo > 0.0 && hi / lo >= 100.0 {
        geometric_grid(lo, hi, SAMPLES_PER_ROUND)
    } else {
        linear_grid(lo, hi, SAMPLES_PER_ROUND)
    };
    let mut previous: Option<f64> = None;
    for _ in 0..MAX_ROUNDS {
        let values = grid
            .par_iter()
            .map(|&w| eval(w))
            .collect::<Result<Vec<_>>>()?;
        let last = grid.len() - 1;
        let i = argmax(&values);
        if (i == 0 && grid[0] <= lo) || (i == last && grid[last] >= hi) {
            return Err(Error::PeakOnBoundary {
                n: n.get(),
                lo,
                hi,
                at: grid[i],
            });
        }
        let c = i.clamp(1, last - 1);
        let estimate = parabolic_vertex([
            (grid[c - 1], values[c - 1]),
            (grid[c], values[c]),
            (grid[c + 1], values[c + 1]),
        ])
        .unwrap_or(grid[i]);
        let step = (grid[c + 1] - grid[c - 1]) / 2.0;

        let settled = previous.is_some_and(|p| (estimate - p).abs() < target_resolution);
        if settled && step <= target_resolution {
            if !is_unimodal(&values, i) {
                return Err(Error::AmbiguousPeak {
                    n: n.get(),
                    lo: grid[0],
                    hi: grid[last],
                });
            }
            return Ok(CriticalPoint {
                n_particles: n,
                omega_m: estimate,
                peak_susceptibility: eval(estimate)?,
                resolution: step,
            });
        }
        previous = Some(estimate);
        let w_lo = grid[i.saturating_sub(1)].max(lo);
        let w_hi = grid[(i + 1).min(last)].min(hi);
        grid = linear_grid(w_lo, w_hi, SAMPLES_PER_ROUND);
    }
    Err(Error::AmbiguousPeak {
        n: n.get(),
        lo: grid[0],
        hi: grid[grid.len() - 1],
    })
}

/// Bracket that holds both derivative peaks of `N`: `[0.05, 4] / N` on the
/// spin-operator axis, converted to `convention`.
pub fn default_bracket(n: SystemSize, convention: CouplingConvention) -> (f64, f64) {
    let big_n = f64::from(n.get());
    (
        convention.from_spin_axis(0.05 / big_n),
        convention.from_spin_axis(4.0 / big_n),
    )
}

/// Delay between the peaks of `d(ΔJ_z)²/dΩ` and `dE/dΩ`, using
/// [`default_bracket`].
pub fn measure_delay(
    n: SystemSize,
    target_resolution: f64,
    convention: CouplingConvention,
) -> Result<DelayRecord> {
    measure_delay_with(
        n,
        default_bracket(n, convention),
        target_resolution,
        &PeakOptions::new(convention),
    )
}

pub fn measure_delay_with(
    n: SystemSize,
    bracket: (f64, f64),
    target_resolution: f64,
    options: &PeakOptions,
) -> Result<DelayRecord> {
    let entropy_peak = find_peak_with(
        n,
        bracket,
        target_resolution,
        &options.observable(PeakObservable::Entropy),
    )?;
    let fluctuation_peak = find_peak_with(
        n,
        bracket,
        target_resolution,
        &options.observable(PeakObservable::Fluctuation),
    )?;
    let delta_omega = fluctuation_peak.omega_m - entropy_peak.omega_m;
    if target_resolution > delta_omega.abs() / 10.0 {
        return Err(Error::ResolutionTooCoarse {
            n: n.get(),
            resolution: target_resolution,
            separation: delta_omega,
            required: delta_omega.abs() / 10.0,
        });
    }
    Ok(DelayRecord {
        n_particles: n,
        delta_omega,
        entropy_peak,
        fluctuation_peak,
    })
}
