//! Crate-wide error type and exit-code mapping.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: bad dimensions, unknown keys, out-of-range
    /// values. Maps to exit code 2.
    #[error("configuration error: {0}")]
    Config(String),

    /// The environment produced a non-finite state or reward, or was driven
    /// with a non-finite action. Carries the step index at which it happened.
    #[error("environment fault at step {step}: {msg}")]
    Environment { step: usize, msg: String },

    /// Training produced a non-finite loss or gradient. Carries the iteration
    /// index. Maps to exit code 3.
    #[error("training fault at iteration {iteration}: {msg}")]
    Training { iteration: usize, msg: String },

    /// A sampled initial state is not usable (inside an obstacle, outside the
    /// reachable set). The caller is expected to resample and retry.
    #[error("initial state rejected: {0}")]
    ResampleRequested(String),

    /// Malformed checkpoint file. Carries the byte offset of the failure.
    #[error("checkpoint parse error at offset {offset}: {msg}")]
    Checkpoint { offset: u64, msg: String },

    /// Maps to exit code 4.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code for the CLI: 0 success, 2 config, 3 training, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::ResampleRequested(_) => 2,
            Error::Environment { .. } | Error::Training { .. } => 3,
            Error::Checkpoint { .. } | Error::Io(_) => 4,
        }
    }
}
