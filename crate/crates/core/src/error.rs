use std::path::PathBuf;

use crate::Mat8;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no admissible steady state: {0}")]
    NoSteadyState(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The drift matrix has an eigenvalue with non-negative real part.
    #[error("drift matrix is not asymptotically stable (margin {margin:e})")]
    Unstable { margin: f64 },

    #[error("unphysical bipartite submatrix: {0}")]
    UnphysicalSubmatrix(String),

    /// Moment integration did not settle before `t_end`; carries the last iterate.
    #[error("moment integration did not converge by t = {t:e} (|dV/dt|_F = {rate:e})")]
    Timeout { t: f64, rate: f64, last: Box<Mat8> },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
