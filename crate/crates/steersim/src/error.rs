use crate::wat::UserId;
use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value or combination of values fails a domain precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Configuration file problems; the report lists every violation found.
    #[error("invalid configuration ({path}):\n{report}")]
    InvalidConfig { path: String, report: String },

    #[error("missing telemetry for active user {user}")]
    MissingTelemetry { user: UserId },

    #[error("missing steering policy for user {user}")]
    MissingPolicy { user: UserId },

    /// Mid-run invariant violation; carries the epoch for context.
    #[error("simulation invariant violated at t={epoch_s}s: {message}")]
    Invariant { epoch_s: f64, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed trace file {path} at line {line}: {message}")]
    TraceFormat {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable process exit code class: 1 config, 2 runtime, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig { .. } | Error::InvalidParameter(_) => 1,
            Error::Io { .. } | Error::TraceFormat { .. } => 3,
            _ => 2,
        }
    }
}
