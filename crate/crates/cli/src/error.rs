use otfs_core::OtfsError;
use serde_json::json;

/// Failure classes with their process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] OtfsError),
    #[error("numerical contract violated: {0}")]
    Contract(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Model(_) | CliError::Csv(_) => 2,
            CliError::Contract(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    /// Machine-readable description written to stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let message = self.to_string();
        match self {
            CliError::Model(OtfsError::CyclicPrefixTooShort {
                required,
                available,
            }) => json!({
                "error": "cyclic-prefix-too-short",
                "required": required,
                "available": available,
                "message": message,
            }),
            CliError::Model(_) => json!({ "error": "invalid-input", "message": message }),
            CliError::Config(_) => json!({ "error": "config", "message": message }),
            CliError::Csv(_) => json!({ "error": "csv", "message": message }),
            CliError::Contract(_) => json!({ "error": "contract-violation", "message": message }),
            CliError::Io(_) => json!({ "error": "io", "message": message }),
        }
    }
}
