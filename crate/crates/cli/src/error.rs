use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),

    #[error("solver failed: {0}")]
    Solver(altproj::Error),

    #[error("cannot write {}: {source}", .path.display())]
    Write { path: PathBuf, source: std::io::Error },

    #[error("verification failed: {0} check(s) outside their bounds")]
    Mismatch(usize),

    #[error("verification incomplete, oracle gave up: {0}")]
    Oracle(altproj::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Write { .. } => 1,
            CliError::Invalid(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Mismatch(_) => 4,
            CliError::Oracle(_) => 5,
        }
    }
}
