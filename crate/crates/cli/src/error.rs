use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] pbg_fluorescence::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Model(e) if e.is_conditioning() => "numerical",
            CliError::Validation(_) => "validation",
            CliError::Io { .. } => "io",
            _ => "config",
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self.kind() {
            "numerical" | "validation" => ExitCode::from(3),
            _ => ExitCode::from(2),
        }
    }

    /// One line of JSON for stderr.
    pub fn report(&self) -> String {
        serde_json::json!({ "error": self.kind(), "reason": self.to_string() }).to_string()
    }
}
