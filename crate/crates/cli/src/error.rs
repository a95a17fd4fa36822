use std::path::PathBuf;

use thiserror::Error;

/// Configuration problems. Each variant names the offending key or line.
#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}` in section [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: key `{key}` given twice (first on line {first})")]
    Duplicate { line: usize, key: String, first: usize },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("keys `{0}` and `{1}` are mutually exclusive")]
    Exclusive(String, String),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("refusing to run: {0}")]
    DivergentRefusal(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] respkit_core::Error),
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 config, 3 numerical or validation failure, 4 divergent-bath refusal, 1 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(respkit_core::Error::Domain(_)) => 2,
            CliError::Numerical(_) | CliError::ValidationFailed(_) => 3,
            CliError::DivergentRefusal(_) => 4,
            CliError::Io { .. } => 1,
        }
    }
}
