use thiserror::Error;

/// Errors raised by the sketching kernels and streaming algorithms.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {found}")]
    Dimension {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite entry in input to {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),

    #[error("SVD did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("boosted SI rejected {attempts} candidates in a row (invocation {invocation})")]
    RetryCapExceeded { attempts: usize, invocation: u64 },

    #[error("stream length mismatch: X has {x} columns, Y has {y}")]
    StreamLength { x: usize, y: usize },

    #[error("matrix market parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(op: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension {
            op,
            expected,
            found,
        });
    }
    Ok(())
}
