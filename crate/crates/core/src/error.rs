// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("config line {line}: key `{key}`: {reason}")]
    Config {
        key: String,
        line: usize,
        reason: String,
    },

    #[error("config: missing required key `{0}`")]
    MissingKey(String),

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("integration diverged at t = {t:e} s: {reason}")]
    Divergence { t: f64, reason: String },

    #[error("root polishing failed near q = {q:e} (residual {residual:e})")]
    RootPolish { q: f64, residual: f64 },

    #[error("non-physical covariance: {0}")]
    NonPhysical(String),

    #[error("stability is indeterminate (Routh-Hurwitz pivot {pivot:e} below tolerance)")]
    MarginalStability { pivot: f64 },

    #[error("configuration is not symmetric: {0}")]
    Asymmetric(String),

    #[error("{0}")]
    Oracle(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code: 2 config/usage, 3 numerical divergence, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Divergence { .. } => 3,
            Error::Io { .. } => 4,
            _ => 2,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
