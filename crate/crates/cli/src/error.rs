use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),

    #[error("acceptance failed:\n  - {}", .0.join("\n  - "))]
    Acceptance(Vec<String>),

    #[error("numerical diagnostic failed: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        Self::Validation(vec![msg.into()])
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 validation or I/O, 2 acceptance, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::Io { .. } | Self::Format { .. } => 1,
            Self::Acceptance(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

impl From<aqpe_core::Error> for CliError {
    fn from(e: aqpe_core::Error) -> Self {
        use aqpe_core::Error as E;
        match e {
            E::NotHermitian { .. }
            | E::NoConvergence
            | E::InvalidDensityMatrix(_)
            | E::TruncationInadequate(_)
            | E::ImaginaryResidue { .. } => Self::Numerical(e.to_string()),
            _ => Self::validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
