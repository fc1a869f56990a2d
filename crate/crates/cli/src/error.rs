use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] abcd_ldg_core::Error),
    #[error("{case}: solution blew up at t = {t}")]
    BlowUp { case: &'static str, t: f64 },
    #[error("acceptance check failed:\n{0}")]
    Acceptance(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use abcd_ldg_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(E::BlowUp { .. }) | CliError::BlowUp { .. } => 3,
            CliError::Solver(_) => 2,
            CliError::Acceptance(_) => 10,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
