use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("unknown {kind} `{name}`; available: {}", available.join(", "))]
    UnknownName { kind: &'static str, name: String, available: Vec<&'static str> },
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] orlicz_core::Error),
}

impl CliError {
    pub fn config(key: &str, reason: impl Into<String>) -> Self {
        Self::Config { key: key.to_string(), reason: reason.into() }
    }

    /// Configuration problems exit with 2, numerical failures with 1.
    pub fn exit_code(&self) -> i32 {
        use orlicz_core::Error as E;
        match self {
            Self::Core(
                E::InvalidArc { .. }
                | E::InvalidGrid(_)
                | E::InvalidExponent(_)
                | E::InvalidParameter { .. }
                | E::OutsideDisc { .. }
                | E::LengthMismatch { .. },
            ) => 2,
            Self::Core(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
