use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum GebtError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] gebt_core::Error),
    #[error("{phase} phase{}: {source}", epoch.map(|e| format!(", epoch {e}")).unwrap_or_default())]
    Run { phase: &'static str, epoch: Option<usize>, source: gebt_core::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = GebtError> = std::result::Result<T, E>;

pub(crate) fn io_at(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> GebtError {
    let path = path.into();
    move |source| GebtError::Io { path, source }
}

pub(crate) fn format_err(path: impl Into<PathBuf>, message: impl Into<String>) -> GebtError {
    GebtError::Format { path: path.into(), message: message.into() }
}

/// Attaches phase and epoch context to a core error.
pub(crate) fn in_phase(phase: &'static str, epoch: Option<usize>) -> impl FnOnce(gebt_core::Error) -> GebtError {
    move |source| GebtError::Run { phase, epoch, source }
}
