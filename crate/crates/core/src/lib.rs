//! Exact diagonalization of the two-mode Bose-Einstein condensate
//! `H = J_z² − Ω J_x` and the finite-size scaling analysis of its ground-state
//! entanglement entropy.
//!
//! * [`spectral`]: Hamiltonian bands, ground state, entropy and `J_z` moments.
//! * [`sweep`]: coupling sweeps, susceptibility peaks and peak delays.
//! * [`scaling`]: power-law fits, critical exponents and data collapse.
//! * [`truncation`]: three-state analytic approximation near `Ω = 0`.
//!
//! The numerical kernels are generic over [`Real`]; the aliases below fix
//! them to `f64`, which is what the sweep pipeline uses.

pub mod eigen;
pub mod error;
pub mod scalar;
pub mod scaling;
pub mod spectral;
pub mod sweep;
pub mod truncation;

pub use error::{Error, Result};
pub use scalar::Real;
pub use spectral::{CouplingConvention, SystemSize};

pub type Coupling = spectral::Coupling<f64>;
pub type Hamiltonian = spectral::TridiagonalHamiltonian<f64>;
pub type GroundState = spectral::FockCoefficients<f64>;
pub type Observables = spectral::Observables<f64>;
pub type PowerLawFit = scaling::PowerLawFit<f64>;
pub type Exponents = scaling::Exponents<f64>;
pub type TruncatedState = truncation::TruncatedState<f64>;
