use thiserror::Error;

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code for configuration, parse and I/O errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numerical failures (ambiguous root, unidentifiable fit).
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] raman_qkd::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        use raman_qkd::Error as E;
        match self {
            CliError::Model(E::AmbiguousRoot { .. } | E::RankDeficient(_) | E::Unidentifiable { .. } | E::UndefinedQber) => {
                EXIT_NUMERICAL
            }
            _ => EXIT_CONFIG,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
