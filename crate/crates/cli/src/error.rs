use std::path::Path;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Simulation(#[from] central_spin::SpinError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("check failed: {0}")]
    Check(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn internal(e: impl std::fmt::Display) -> Self {
        CliError::Internal(e.to_string())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Simulation(_) => "simulation",
            CliError::Io { .. } => "io",
            CliError::Check(_) => "check",
            CliError::Internal(_) => "internal",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self, subcommand: Option<&str>) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "subcommand": subcommand,
                "message": self.to_string(),
            }
        })
        .to_string()
    }
}
