use std::path::PathBuf;

/// Exit status for unusable input: bad flags, unreadable files, malformed JSON.
pub const USAGE: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read or write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] ggp_local::Error),
}

impl CliError {
    /// Budget exhaustion is inconclusive; everything else is unusable input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(ggp_local::Error::Budget(_)) => 2,
            _ => USAGE,
        }
    }
}
