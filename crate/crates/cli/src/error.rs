use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] fepkit::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 2 for anything the caller can fix by changing the invocation.
    pub fn exit_code(&self) -> i32 {
        use fepkit::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(
                E::InvalidInput(_)
                | E::InvalidPolicy(_)
                | E::NonFinite
                | E::NonSquare { .. }
                | E::Unsupported(_)
                | E::Inapplicable(_)
                | E::TooLarge { .. },
            ) => 2,
            _ => 1,
        }
    }
}
