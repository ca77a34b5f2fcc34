use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition of an operation was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unsupported derivative order {order} (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },

    /// Commutator of two symmetrised operators whose orders are not covered
    /// by the closed-form rule table.
    #[error("rule not in table: [<f>_{0}, <g>_{1}]")]
    RuleNotInTable(usize, usize),

    #[error("unsupported quadrature: {0}")]
    Quadrature(String),

    #[error("missing table entry: {0}")]
    MissingTable(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("dense oracle: {0}")]
    Oracle(String),

    #[error("config: {0}")]
    Config(String),

    #[error("bad wavefunction dump: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
