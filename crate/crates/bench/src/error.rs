use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid distribution: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Numerical(#[from] moment_info::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl BenchError {
    /// Process exit code: 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use moment_info::Error as E;
        match self {
            BenchError::Numerical(
                E::InvalidArgument(_)
                | E::InsufficientOrder { .. }
                | E::CapExceeded { .. }
                | E::EmptySamples
                | E::VariableMismatch,
            ) => 2,
            BenchError::Numerical(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
