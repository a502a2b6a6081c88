use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or arguments.
    #[error("invalid configuration: {0}")]
    Validation(String),

    /// Grid, scan range or delay cannot resolve the requested quantity.
    #[error("numerical resolution: {0}")]
    Resolution(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Resolution(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<qcomb_core::Error> for CliError {
    fn from(e: qcomb_core::Error) -> Self {
        use qcomb_core::Error as E;
        match e {
            E::Solver(_) => CliError::Resolution(e.to_string()),
            _ if e.is_resolution() => CliError::Resolution(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}
