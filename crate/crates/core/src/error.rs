use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system size N = {0}: particle number must be even and at least 2")]
    InvalidSize(u64),

    #[error("invalid coupling {0}: must be finite and non-negative")]
    InvalidCoupling(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "eigensolver did not converge for N = {n}, omega = {omega} after {iterations} iterations"
    )]
    NoConvergence { n: u32, omega: f64, iterations: usize },

    #[error(
        "susceptibility maximum for N = {n} sits on the bracket edge at omega = {at} \
         (bracket [{lo}, {hi}]); widen the bracket"
    )]
    PeakOnBoundary { n: u32, lo: f64, hi: f64, at: f64 },

    #[error("susceptibility for N = {n} is not unimodal in the final window [{lo}, {hi}]")]
    AmbiguousPeak { n: u32, lo: f64, hi: f64 },

    #[error(
        "resolution {resolution} cannot separate the two peaks of N = {n} \
         (separation {separation}); use a target resolution at most {required}"
    )]
    ResolutionTooCoarse {
        n: u32,
        resolution: f64,
        separation: f64,
        required: f64,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
