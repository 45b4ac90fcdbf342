use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Compare(String),
}

impl LabError {
    /// Machine-readable category printed on abort.
    pub fn category(&self) -> &'static str {
        match self {
            LabError::Config(_) => "config",
            LabError::Io { .. } => "io",
            LabError::Numerical(_) => "numerical",
            LabError::Compare(_) => "compare",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Compare(_) => 2,
            LabError::Numerical(_) => 3,
            LabError::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> LabError {
        let path = path.into();
        move |source| LabError::Io { path, source }
    }
}
