use thiserror::Error;

/// Operational failures. Mathematical outcomes are never errors; they live in
/// the report body.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("fixture {path}: {msg}")]
    Fixture { path: String, msg: String },
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Fixture { .. } => 4,
            CliError::Io(_) => 1,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
