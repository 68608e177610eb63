use thiserror::Error;

/// Failures that end a run, each tied to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure in cell {cell}: {source}")]
    Numerical { cell: String, source: baskakov::error::Error },

    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical { .. } => 3,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }

    /// Sorts a library error raised while computing `cell` into a
    /// numerical failure or a configuration problem.
    pub fn from_core(cell: impl Into<String>, err: baskakov::error::Error) -> Self {
        use baskakov::error::Error as E;
        let cell = cell.into();
        match err {
            E::TailNotAbsorbed { .. } | E::QuadratureDidNotConverge { .. } | E::LinearDomainRange(_) => {
                CliError::Numerical { cell, source: err }
            }
            other => CliError::Config(format!("{cell}: {other}")),
        }
    }
}
