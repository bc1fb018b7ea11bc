use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const IO: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const SOLVER: i32 = 3;
    pub const BRACKET: i32 = 4;
    pub const VERIFICATION: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}, line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error(transparent)]
    Core(#[from] bec_entanglement::Error),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use bec_entanglement::Error as E;
        match self {
            CliError::Io { .. } => exit::IO,
            CliError::Input(_) | CliError::Parse { .. } => exit::INPUT,
            CliError::Verification(_) => exit::VERIFICATION,
            CliError::Core(e) => match e {
                E::InvalidSize(_) | E::InvalidCoupling(_) | E::InvalidInput(_) => exit::INPUT,
                E::NoConvergence { .. } => exit::SOLVER,
                E::PeakOnBoundary { .. } | E::AmbiguousPeak { .. } | E::ResolutionTooCoarse { .. } => {
                    exit::BRACKET
                }
            },
        }
    }
}
