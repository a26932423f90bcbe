//! Library side of the `doorscape` binary: manifest handling, command
//! implementations and the deterministic renderers. Kept as a lib so
//! integration tests can drive commands without spawning processes.

pub mod commands;
pub mod manifest;
pub mod render;

use thiserror::Error;

/// Command failures carrying the process exit code policy: bad inputs or
/// configuration exit 2, internal failures (I/O on outputs) exit 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{stage}: {message}")]
    Validation { stage: &'static str, message: String },
    #[error("{stage}: {message}")]
    Internal { stage: &'static str, message: String },
}

impl CliError {
    pub fn validation(stage: &'static str, err: impl std::fmt::Display) -> Self {
        CliError::Validation {
            stage,
            message: err.to_string(),
        }
    }

    pub fn internal(stage: &'static str, err: impl std::fmt::Display) -> Self {
        CliError::Internal {
            stage,
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Internal { .. } => 1,
        }
    }
}

/// Writes a file atomically: temp file in the target directory, then rename.
pub fn write_atomic(path: &std::path::Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| std::path::Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    std::io::Write::write_all(&mut tmp, bytes)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
