use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;
use thiserror::Error;

/// A failure with its process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input, bad configuration, I/O.
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Unprovable(String),
    /// The proof cannot be illustrated.
    #[error("{0}")]
    Illustrate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Unprovable(_) => 2,
            CliError::Illustrate(_) => 3,
        }
    }
}

pub fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Writes `dir/name` through a temporary file in the same directory.
pub fn write_atomic(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let parent = path.parent().unwrap_or(dir);
    let io = |e: std::io::Error| CliError::Input(format!("{}: {e}", path.display()));
    fs::create_dir_all(parent).map_err(io)?;
    let mut tmp = NamedTempFile::new_in(parent).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(&path).map_err(|e| io(e.error))?;
    Ok(path)
}
