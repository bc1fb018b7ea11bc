//! Power-law fits of critical data, critical exponents, and finite-size data
//! collapse of susceptibility curves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sweep::{CriticalPoint, SweepCurve};

/// `value ≈ prefactor · n^exponent`, fitted in log-log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit<T> {
    pub prefactor: T,
    pub exponent: T,
    /// Root-mean-square residual of `ln(value)`.
    pub rms_log_residual: T,
}

impl<T: Real> PowerLawFit<T> {
    pub fn eval(&self, n: T) -> T {
        self.prefactor * n.powf(self.exponent)
    }
}

/// Unweighted least squares of `ln(value)` on `ln(n)`.
pub fn fit_power_law<T: Real>(points: &[(T, T)]) -> Result<PowerLawFit<T>> {
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    for &(n, v) in points {
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::invalid(format!("non-positive abscissa {n}")));
        }
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::invalid(format!("non-positive value {v} at n = {n}")));
        }
    }
    for (i, a) in points.iter().enumerate() {
        if points[i + 1..].iter().any(|b| b.0 == a.0) {
            return Err(Error::invalid(format!("duplicate abscissa {}", a.0)));
        }
    }

    let m = T::from_count(points.len());
    let logs: Vec<(T, T)> = points.iter().map(|&(n, v)| (n.ln(), v.ln())).collect();
    let (sx, sy) = logs
        .iter()
        .fold((T::zero(), T::zero()), |(sx, sy), &(x, y)| (sx + x, sy + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxx, sxy) = logs.iter().fold((T::zero(), T::zero()), |(sxx, sxy), &(x, y)| {
        let dx = x - mx;
        (sxx + dx * dx, sxy + dx * (y - my))
    });
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = logs.iter().fold(T::zero(), |acc, &(x, y)| {
        let r = y - (intercept + slope * x);
        acc + r * r
    });
    Ok(PowerLawFit {
        prefactor: intercept.exp(),
        exponent: slope,
        rms_log_residual: (ss / m).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents<T> {
    /// Correlation-length exponent, `1/|exponent of Ω_m(N)|`.
    pub nu: T,
    /// Susceptibility exponent, `(exponent of χ_m(N)) · ν`.
    pub gamma: T,
}

pub fn critical_exponents<T: Real>(
    omega_fit: &PowerLawFit<T>,
    chi_fit: &PowerLawFit<T>,
) -> Result<Exponents<T>> {
    if !(omega_fit.exponent < T::zero()) {
        return Err(Error::invalid(format!(
            "critical-point exponent must be negative, got {}",
            omega_fit.exponent
        )));
    }
    if !(chi_fit.exponent > T::zero()) {
        return Err(Error::invalid(format!(
            "susceptibility exponent must be positive, got {}",
            chi_fit.exponent
        )));
    }
    let nu = T::one() / omega_fit.exponent.abs();
    Ok(Exponents {
        nu,
        gamma: chi_fit.exponent * nu,
    })
}

/// Number of points on the shared abscissa used for scoring.
pub const COLLAPSE_GRID_POINTS: usize = 201;

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseCurve {
    pub n_particles: u32,
    /// `(N^ν (Ω − Ω_m), N^−a (χ − χ_m))`, increasing in x.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapsePlot {
    /// Rescaled curves, ordered by `N`.
    pub curves: Vec<CollapseCurve>,
    /// Common x-range of all curves.
    pub window: (f64, f64),
    /// Mean squared deviation from the pointwise mean curve over `window`.
    pub collapse_score: f64,
}

/// Rescales susceptibility curves to `x = N^ν (Ω − Ω_m)`,
/// `y = N^−a (χ − χ_m)` and scores how well they coincide.
pub fn data_collapse(
    curves: &[SweepCurve],
    criticals: &[CriticalPoint],
    nu: f64,
    chi_exponent: f64,
) -> Result<CollapsePlot> {
    if curves.is_empty() {
        return Err(Error::invalid("data collapse needs at least one curve"));
    }
    if !(nu > 0.0) || !nu.is_finite() || !chi_exponent.is_finite() {
        return Err(Error::invalid(format!(
            "invalid collapse exponents nu = {nu}, a = {chi_exponent}"
        )));
    }
    let mut rescaled = Vec::with_capacity(curves.len());
    for curve in curves {
        let n = curve.n_particles;
        let crit = criticals
            .iter()
            .find(|c| c.n_particles == n)
            .ok_or_else(|| Error::invalid(format!("no critical point for N = {n}")))?;
        if curve.samples.len() < 2 {
            return Err(Error::invalid(format!(
                "curve for N = {n} has fewer than two samples"
            )));
        }
        let big_n = f64::from(n.get());
        let sx = big_n.powf(nu);
        let sy = big_n.powf(-chi_exponent);
        let points = curve
            .samples
            .iter()
            .map(|s| {
                (
                    sx * (s.omega - crit.omega_m),
                    sy * (s.susceptibility - crit.peak_susceptibility),
                )
            })
            .collect();
        rescaled.push(CollapseCurve {
            n_particles: n.get(),
            points,
        });
    }
    rescaled.sort_by_key(|c| c.n_particles);

    let lo = rescaled
        .iter()
        .map(|c| c.points[0].0)
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = rescaled
        .iter()
        .map(|c| c.points[c.points.len() - 1].0)
        .fold(f64::INFINITY, f64::min);
    if !(lo < hi) {
        return Err(Error::invalid(format!(
            "rescaled curves share no x-range (overlap [{lo}, {hi}])"
        )));
    }
    let series: Vec<&[(f64, f64)]> = rescaled.iter().map(|c| c.points.as_slice()).collect();
    let collapse_score = collapse_score(&series, (lo, hi), COLLAPSE_GRID_POINTS);
    Ok(CollapsePlot {
        curves: rescaled,
        window: (lo, hi),
        collapse_score,
    })
}

/// Mean over a uniform grid on `window` of the variance across curves, each
/// curve linearly interpolated. Curves must be sorted in x and cover `window`.
pub fn collapse_score(curves: &[&[(f64, f64)]], window: (f64, f64), grid_points: usize) -> f64 {
    let k = curves.len() as f64;
    let steps = (grid_points.max(2) - 1) as f64;
    let mut total = 0.0;
    let mut ys = vec![0.0; curves.len()];
    for g in 0..grid_points.max(2) {
        let x = window.0 + (window.1 - window.0) * g as f64 / steps;
        for (y, c) in ys.iter_mut().zip(curves) {
            *y = interpolate(c, x);
        }
        let mean = ys.iter().sum::<f64>() / k;
        total += ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / k;
    }
    total / (steps + 1.0)
}

/// [`CollapsePlot::collapse_score`] divided by the mean squared ordinate on
/// the same grid. Unlike the raw score it does not change when every
/// ordinate is multiplied by a common factor, so plots built with different
/// `a` can be compared.
pub fn relative_collapse_score(plot: &CollapsePlot) -> f64 {
    let (lo, hi) = plot.window;
    let steps = (COLLAPSE_GRID_POINTS - 1) as f64;
    let mut total = 0.0;
    for g in 0..COLLAPSE_GRID_POINTS {
        let x = lo + (hi - lo) * g as f64 / steps;
        for c in &plot.curves {
            let y = interpolate(&c.points, x);
            total += y * y;
        }
    }
    let mean_sq = total / (COLLAPSE_GRID_POINTS * plot.curves.len()) as f64;
    if mean_sq == 0.0 {
        return 0.0;
    }
    plot.collapse_score / mean_sq
}

/// Amplitude of the synthetic solver noise used to calibrate the threshold.
pub const CALIBRATION_NOISE: f64 = 1e-8;
/// Threshold = this factor times the noise-only score.
pub const CALIBRATION_FACTOR: f64 = 100.0;

/// Score of `copies` replicas of `reference`, each with independent uniform
/// noise in `[-noise, noise]` added to every ordinate.
pub fn noise_floor_score(
    reference: &[(f64, f64)],
    window: (f64, f64),
    copies: usize,
    noise: f64,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let replicas: Vec<Vec<(f64, f64)>> = (0..copies.max(1))
        .map(|_| {
            reference
                .iter()
                .map(|&(x, y)| (x, y + rng.gen_range(-noise..=noise)))
                .collect()
        })
        .collect();
    let views: Vec<&[(f64, f64)]> = replicas.iter().map(Vec::as_slice).collect();
    collapse_score(&views, window, COLLAPSE_GRID_POINTS)
}

/// Absolute collapse threshold for `plot`: [`CALIBRATION_FACTOR`] times the
/// score of identical copies of its first curve perturbed at
/// [`CALIBRATION_NOISE`].
pub fn calibrated_collapse_threshold(plot: &CollapsePlot) -> f64 {
    CALIBRATION_FACTOR
        * noise_floor_score(
            &plot.curves[0].points,
            plot.window,
            plot.curves.len().max(2),
            CALIBRATION_NOISE,
            0x5eed,
        )
}

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let idx = points.partition_point(|p| p.0 < x);
    if idx == 0 {
        return points[0].1;
    }
    if idx >= points.len() {
        return points[points.len() - 1].1;
    }
    let (x0, y0) = points[idx - 1];
    let (x1, y1) = points[idx];
    if x1 == x0 {
        return y1;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}
