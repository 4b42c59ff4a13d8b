use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{failed} of {total} grid points failed")]
    Partial { failed: usize, total: usize },
    #[error("stopped after {0} new points; rerun with --resume")]
    Interrupted(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] floquet_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Partial { .. } | CliError::Interrupted(_) => ExitCode::from(3),
            CliError::Io(_) | CliError::Core(_) => ExitCode::from(1),
        }
    }
}
