use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid catalog: {0}")]
    Catalog(String),
    #[error(transparent)]
    Core(#[from] qls_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad input, 3 for solver infeasibility, 4 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_infeasible() => 3,
            CliError::Core(e) if e.is_numerical() => 4,
            CliError::Usage(_) | CliError::Catalog(_) | CliError::Core(_) | CliError::Io(_) => 2,
            CliError::Csv(_) | CliError::Json(_) => 4,
        }
    }
}
