use thiserror::Error;

/// Failure of a CLI invocation, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Static problems with the configuration, one message per line.
    #[error("{}", .0.join("\n"))]
    Config(Vec<String>),
    #[error("model error: {0}")]
    Model(#[from] qtherm::Error),
    /// A model error at one point of a sweep.
    #[error("model error at {key} = {at}: {source}")]
    ModelAt {
        key: String,
        at: f64,
        source: qtherm::Error,
    },
    /// Bugs: broken table shapes, panics in a worker.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(vec![msg.into()])
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(_) | CliError::ModelAt { .. } => 3,
            CliError::Internal(_) => 4,
        }
    }
}
