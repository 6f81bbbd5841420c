use thiserror::Error;

/// Failures of the bench tooling, grouped by the process exit code they map to.
#[derive(Error, Debug)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 1,
            BenchError::Data(_) => 2,
            BenchError::Numerical(_) => 3,
        }
    }
}

impl From<scod_core::Error> for BenchError {
    fn from(e: scod_core::Error) -> Self {
        use scod_core::Error as E;
        match e {
            E::InvalidParameter(_) => BenchError::Config(e.to_string()),
            E::NonFinite(_) | E::NoConvergence { .. } | E::RetryCapExceeded { .. } => {
                BenchError::Numerical(e.to_string())
            }
            E::Dimension { .. }
            | E::InvalidStructure(_)
            | E::StreamLength { .. }
            | E::Parse { .. }
            | E::Io(_) => BenchError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for BenchError {
    fn from(e: std::io::Error) -> Self {
        BenchError::Data(e.to_string())
    }
}

impl From<csv::Error> for BenchError {
    fn from(e: csv::Error) -> Self {
        BenchError::Data(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
