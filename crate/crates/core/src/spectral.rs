//! Two-mode Hamiltonian in the fixed-N Fock basis, its ground state, and the
//! entanglement and population-imbalance observables of that state.
//!
//! The basis state `|n, N−n⟩` holds `n` bosons in mode 1 and `N − n` in mode 2.
//! In this basis `J_z` is diagonal with eigenvalue `N/2 − n` and the tunneling
//! term only connects neighbouring `n`, so the Hamiltonian is tridiagonal.

use std::fmt;
use std::str::FromStr;

use crate::eigen::{self, SolverConfig};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Total boson number. Always even and at least 2.
///
/// Odd `N` has a two-fold degenerate ground state at zero coupling and is
/// rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SystemSize(u32);

impl SystemSize {
    pub fn new(n_particles: u32) -> Result<Self> {
        if n_particles < 2 || n_particles % 2 != 0 {
            return Err(Error::InvalidSize(u64::from(n_particles)));
        }
        Ok(Self(n_particles))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Dimension of the Fock space, `N + 1`.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn half(self) -> u32 {
        self.0 / 2
    }

    /// Maximal entropy `log₂(N + 1)` in bits.
    pub fn max_entropy_bits<T: Real>(self) -> T {
        T::from_count(self.dim()).log2()
    }
}

impl TryFrom<u32> for SystemSize {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Self::new(n)
    }
}

impl FromStr for SystemSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n: u64 = s
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("not a particle number: {s:?}")))?;
        let n = u32::try_from(n).map_err(|_| Error::InvalidSize(n))?;
        Self::new(n)
    }
}

impl fmt::Display for SystemSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dimensionless tunneling strength, in units of the interaction `χ`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Coupling<T>(T);

impl<T: Real> Coupling<T> {
    pub fn new(omega: T) -> Result<Self> {
        if !omega.is_finite() || omega < T::zero() {
            return Err(Error::InvalidCoupling(omega.as_f64()));
        }
        Ok(Self(omega))
    }

    pub fn zero() -> Self {
        Self(T::zero())
    }

    pub fn get(self) -> T {
        self.0
    }
}

/// How the coupling `Ω` multiplies the tunneling operator.
///
/// * `SpinOperator`: `H = J_z² − Ω J_x` with `J_x = (a₁†a₂ + a₂†a₁)/2`.
/// * `PairHopping`: `H = J_z² − Ω (a₁†a₂ + a₂†a₁)`, i.e. `Ω_pair = Ω_spin / 2`.
///
/// The published critical-point and susceptibility data are on the
/// `PairHopping` axis, so the figure pipeline uses it by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CouplingConvention {
    #[default]
    SpinOperator,
    PairHopping,
}

impl CouplingConvention {
    /// Factor `f` in the hopping element `−f Ω √((n+1)(N−n))`.
    pub fn hopping_factor<T: Real>(self) -> T {
        match self {
            CouplingConvention::SpinOperator => T::lit(0.5),
            CouplingConvention::PairHopping => T::one(),
        }
    }

    /// Converts a coupling on this axis into the `SpinOperator` axis.
    pub fn to_spin_axis<T: Real>(self, omega: T) -> T {
        omega * self.hopping_factor::<T>() * T::lit(2.0)
    }

    /// Converts a `SpinOperator` coupling onto this axis.
    pub fn from_spin_axis<T: Real>(self, omega_spin: T) -> T {
        omega_spin / (self.hopping_factor::<T>() * T::lit(2.0))
    }

    pub fn name(self) -> &'static str {
        match self {
            CouplingConvention::SpinOperator => "spin",
            CouplingConvention::PairHopping => "pair",
        }
    }
}

impl FromStr for CouplingConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "spin" | "spin-operator" => Ok(Self::SpinOperator),
            "pair" | "pair-hopping" => Ok(Self::PairHopping),
            other => Err(Error::invalid(format!(
                "unknown coupling convention {other:?} (expected \"spin\" or \"pair\")"
            ))),
        }
    }
}

impl fmt::Display for CouplingConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Diagonal and off-diagonal bands of the Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian<T> {
    pub size: SystemSize,
    pub omega: T,
    pub convention: CouplingConvention,
    /// `diag[n] = (N/2 − n)²`, length `N + 1`.
    pub diag: Vec<T>,
    /// `offdiag[n] = −f Ω √((n+1)(N−n))`, length `N`.
    pub offdiag: Vec<T>,
}

/// Builds `H = J_z² − Ω J_x`.
pub fn build_hamiltonian<T: Real>(n: SystemSize, omega: Coupling<T>) -> TridiagonalHamiltonian<T> {
    build_hamiltonian_with(n, omega, CouplingConvention::SpinOperator)
}

pub fn build_hamiltonian_with<T: Real>(
    n: SystemSize,
    omega: Coupling<T>,
    convention: CouplingConvention,
) -> TridiagonalHamiltonian<T> {
    let big_n = n.get() as usize;
    let half = T::from_count(big_n) / T::lit(2.0);
    let diag = (0..=big_n)
        .map(|k| {
            let jz = half - T::from_count(k);
            jz * jz
        })
        .collect();
    let scale = -omega.get() * convention.hopping_factor::<T>();
    let offdiag = (0..big_n)
        .map(|k| {
            let amp = (T::from_count(k + 1) * T::from_count(big_n - k)).sqrt();
            // keep exact zeros at Ω = 0 rather than -0.0
            if scale == T::zero() {
                T::zero()
            } else {
                scale * amp
            }
        })
        .collect();
    TridiagonalHamiltonian {
        size: n,
        omega: omega.get(),
        convention,
        diag,
        offdiag,
    }
}

impl<T: Real> TridiagonalHamiltonian<T> {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `H x`.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        eigen::tridiagonal_apply(&self.diag, &self.offdiag, x)
    }

    /// Row-major dense copy, for cross-checks on small systems.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.dim();
        let mut m = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i + 1 < n {
                m[i][i + 1] = self.offdiag[i];
                m[i + 1][i] = self.offdiag[i];
            }
        }
        m
    }
}

/// Ground-state amplitudes `c_n` of `|n, N−n⟩` and the ground energy.
///
/// Normalized, with the largest-magnitude amplitude positive.
#[derive(Debug, Clone, PartialEq)]
pub struct FockCoefficients<T> {
    pub amplitudes: Vec<T>,
    pub energy: T,
}

impl<T: Real> FockCoefficients<T> {
    pub fn norm_sq(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |acc, &c| acc + c * c)
    }

    /// Occupation probabilities `c_n²`, the reduced-density eigenvalues of mode 1.
    pub fn probabilities(&self) -> impl Iterator<Item = T> + '_ {
        self.amplitudes.iter().map(|&c| c * c)
    }

    /// `‖Hc − Ec‖₂`.
    pub fn residual(&self, h: &TridiagonalHamiltonian<T>) -> T {
        h.apply(&self.amplitudes)
            .iter()
            .zip(&self.amplitudes)
            .fold(T::zero(), |acc, (&hc, &c)| {
                let r = hc - self.energy * c;
                acc + r * r
            })
            .sqrt()
    }
}

pub fn ground_state<T: Real>(h: &TridiagonalHamiltonian<T>) -> Result<FockCoefficients<T>> {
    ground_state_with(h, &SolverConfig::default())
}

pub fn ground_state_with<T: Real>(
    h: &TridiagonalHamiltonian<T>,
    config: &SolverConfig<T>,
) -> Result<FockCoefficients<T>> {
    let pair = eigen::lowest_eigenpair(&h.diag, &h.offdiag, config).map_err(|e| {
        Error::NoConvergence {
            n: h.size.get(),
            omega: h.omega.as_f64(),
            iterations: e.iterations,
        }
    })?;
    let mut amplitudes = pair.vector;
    let lead = amplitudes
        .iter()
        .fold(T::zero(), |best, &c| if c.abs() > best.abs() { c } else { best });
    if lead < T::zero() {
        for c in amplitudes.iter_mut() {
            *c = -*c;
        }
    }
    Ok(FockCoefficients {
        amplitudes,
        energy: pair.value,
    })
}

/// Von Neumann entropy of either mode in bits, `−Σ c_n² log₂ c_n²`.
///
/// The state `Σ c_n |n⟩₁|N−n⟩₂` is already in Schmidt form. Weights below
/// `1e-300` contribute nothing.
pub fn raw_entropy<T: Real>(c: &FockCoefficients<T>) -> T {
    entropy_bits(c.probabilities())
}

pub(crate) fn entropy_bits<T: Real>(weights: impl Iterator<Item = T>) -> T {
    let floor = T::lit(1e-300);
    weights.fold(T::zero(), |acc, p| {
        if p <= floor {
            acc
        } else {
            acc - p * p.log2()
        }
    })
}

/// Entropy normalized by `log₂(N + 1)`, in `[0, 1]`.
pub fn entanglement_entropy<T: Real>(c: &FockCoefficients<T>, n: SystemSize) -> T {
    raw_entropy(c) / n.max_entropy_bits::<T>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JzMoments<T> {
    pub mean: T,
    /// `(ΔJ_z)² = ⟨J_z²⟩ − ⟨J_z⟩²`.
    pub fluct: T,
}

pub fn jz_moments<T: Real>(c: &FockCoefficients<T>, n: SystemSize) -> JzMoments<T> {
    let half = T::from_count(n.get() as usize) / T::lit(2.0);
    let (m1, m2) = c
        .probabilities()
        .enumerate()
        .fold((T::zero(), T::zero()), |(m1, m2), (k, p)| {
            let jz = half - T::from_count(k);
            (m1 + p * jz, m2 + p * jz * jz)
        });
    JzMoments {
        mean: m1,
        fluct: (m2 - m1 * m1).max(T::zero()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables<T> {
    /// Normalized entropy in `[0, 1]`.
    pub entropy: T,
    pub jz_mean: T,
    pub jz_fluct: T,
}

pub fn observables<T: Real>(c: &FockCoefficients<T>, n: SystemSize) -> Observables<T> {
    let m = jz_moments(c, n);
    Observables {
        entropy: entanglement_entropy(c, n),
        jz_mean: m.mean,
        jz_fluct: m.fluct,
    }
}

/// Builds, solves and measures one `(N, Ω)` point.
pub fn solve_point<T: Real>(
    n: SystemSize,
    omega: T,
    convention: CouplingConvention,
) -> Result<(FockCoefficients<T>, Observables<T>)> {
    let h = build_hamiltonian_with(n, Coupling::new(omega)?, convention);
    let c = ground_state(&h)?;
    let obs = observables(&c, n);
    Ok((c, obs))
}
