//! Three-state approximation of the weakly delocalized ground state.
//!
//! Near `Ω = 0` the ground state is kept on `|N/2, N/2⟩` and its two tunneling
//! neighbours `|N/2 ∓ 1, N/2 ± 1⟩` with equal weight on the neighbours:
//!
//! ```text
//! c₁² = (1 − 1/√(1 + Ω²N²/2)) / 4,   c₀ = √(1 − 2c₁²),   E = −(ΩN/2)(c₁/c₀)
//! ```
//!
//! using `√(N/2 (N/2 + 1)) ≈ N/2` for the hopping element. Couplings are on
//! the `SpinOperator` axis.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scaling::fit_power_law;
use crate::spectral::{entropy_bits, SystemSize};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedState<T> {
    /// Amplitude of `|N/2, N/2⟩`.
    pub c0: T,
    /// Common amplitude of `|N/2 − 1, N/2 + 1⟩` and `|N/2 + 1, N/2 − 1⟩`.
    pub c1: T,
    pub energy: T,
}

impl<T: Real> TruncatedState<T> {
    pub fn c1_sq(&self) -> T {
        self.c1 * self.c1
    }
}

pub fn truncated_state<T: Real>(n: SystemSize, omega: T) -> Result<TruncatedState<T>> {
    if n.get() < 4 {
        return Err(Error::invalid(format!(
            "three-state truncation needs N >= 4, got {n}"
        )));
    }
    if !omega.is_finite() || omega < T::zero() {
        return Err(Error::InvalidCoupling(omega.as_f64()));
    }
    let big_n = T::from_count(n.get() as usize);
    let x = omega * big_n;
    let quarter = T::lit(0.25);
    // smaller of the two roots, written without the 1 − 1/√(1+u) cancellation
    let u = x * x / T::lit(2.0);
    let r = (T::one() + u).sqrt();
    let c1_sq = quarter * u / (r * (T::one() + r));
    let c1 = c1_sq.sqrt();
    let c0 = (T::one() - T::lit(2.0) * c1_sq).sqrt();
    let energy = -(x / T::lit(2.0)) * (c1 / c0);
    Ok(TruncatedState { c0, c1, energy })
}

/// Three-term entropy in bits.
pub fn truncated_raw_entropy<T: Real>(state: &TruncatedState<T>) -> T {
    let p1 = state.c1_sq();
    let p0 = state.c0 * state.c0;
    entropy_bits([p0, p1, p1].into_iter())
}

/// Three-term entropy normalized by `log₂(N + 1)`.
pub fn truncated_entropy<T: Real>(state: &TruncatedState<T>, n: SystemSize) -> T {
    truncated_raw_entropy(state) / n.max_entropy_bits::<T>()
}

/// `d/dΩ` of the normalized truncated entropy by central difference with
/// step `10⁻³ Ω`.
pub fn truncated_susceptibility<T: Real>(n: SystemSize, omega: T) -> Result<T> {
    if omega <= T::zero() {
        return Err(Error::invalid("truncated susceptibility needs omega > 0"));
    }
    let h = T::lit(1e-3) * omega;
    let up = truncated_entropy(&truncated_state(n, omega + h)?, n);
    let down = truncated_entropy(&truncated_state(n, omega - h)?, n);
    Ok((up - down) / (T::lit(2.0) * h))
}

/// Power-law exponent of the truncated susceptibility along `Ω = omega_rule(N)`.
pub fn truncated_susceptibility_exponent<T, F>(n_values: &[SystemSize], omega_rule: F) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    if n_values.len() < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 system sizes, got {}",
            n_values.len()
        )));
    }
    let points = n_values
        .iter()
        .map(|&n| {
            let big_n = T::from_count(n.get() as usize);
            Ok((big_n, truncated_susceptibility(n, omega_rule(big_n))?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fit_power_law(&points)?.exponent)
}

/// The fitted critical line `Ω = 0.319225 N^−0.989062`.
pub fn published_critical_line<T: Real>(n: T) -> T {
    T::lit(0.319225) * n.powf(T::lit(-0.989062))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn size(n: u32) -> SystemSize {
        SystemSize::new(n).unwrap()
    }

    #[test]
    fn zero_coupling_is_self_trapped() {
        for n in [4, 100, 2700] {
            let s = truncated_state(size(n), 0.0).unwrap();
            assert_eq!((s.c0, s.c1, s.energy), (1.0, 0.0, 0.0));
            assert_eq!(truncated_entropy(&s, size(n)), 0.0);
        }
    }

    #[test]
    fn closed_form_examples() {
        let s = truncated_state(size(1000), 0.002).unwrap();
        assert_abs_diff_eq!(s.c1_sq(), 0.25 * (1.0 - 1.0 / 3f64.sqrt()), epsilon = 1e-15);
        assert_abs_diff_eq!(s.c1_sq(), 0.10566, epsilon = 1e-5);

        let s = truncated_state(size(4), 0.1).unwrap();
        assert_abs_diff_eq!(s.c1_sq(), 0.25 * (1.0 - 1.0 / 1.08f64.sqrt()), epsilon = 1e-15);
        assert_abs_diff_eq!(s.c1_sq(), 0.0094374, epsilon = 1e-6);
    }

    #[test]
    fn entropy_at_n1000() {
        let s = truncated_state(size(1000), 0.002).unwrap();
        let p1 = 0.25 * (1.0 - 1.0 / 3f64.sqrt());
        let p0 = 1.0 - 2.0 * p1;
        let raw = -p0 * p0.log2() - 2.0 * p1 * p1.log2();
        assert_abs_diff_eq!(truncated_raw_entropy(&s), raw, epsilon = 1e-14);
        assert_abs_diff_eq!(raw, 0.955332, epsilon = 1e-6);
        assert_abs_diff_eq!(truncated_entropy(&s, size(1000)), 0.0958474, epsilon = 1e-6);
    }

    #[test]
    fn equal_weights_give_log3() {
        let third = (1.0f64 / 3.0).sqrt();
        let s = TruncatedState {
            c0: third,
            c1: third,
            energy: 0.0,
        };
        assert_abs_diff_eq!(truncated_raw_entropy(&s), 3f64.log2(), epsilon = 1e-15);
    }

    #[test]
    fn normalization_and_root_choice() {
        for &om in &[0.0, 1e-4, 0.01, 0.3, 5.0, 1e3] {
            let s = truncated_state(size(400), om).unwrap();
            assert_abs_diff_eq!(s.c0 * s.c0 + 2.0 * s.c1_sq(), 1.0, epsilon = 1e-12);
            assert!(s.c1_sq() <= 0.25);
        }
    }

    #[test]
    fn exponent_needs_three_sizes() {
        let sizes = [size(10_000), size(100_000)];
        assert!(truncated_susceptibility_exponent(&sizes, |n: f64| 1.0 / n).is_err());
    }

    #[test]
    fn tiny_coupling_keeps_precision() {
        // c₁² → Ω²N²/16 as ΩN → 0
        let s = truncated_state(size(4), 1e-12).unwrap();
        assert_abs_diff_eq!(s.c1_sq() / (16e-24 / 16.0), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn rejects_small_systems() {
        assert!(truncated_state(size(2), 0.1).is_err());
    }
}
