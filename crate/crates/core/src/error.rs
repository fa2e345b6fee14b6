use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Problems with on-disk binary or image formats.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },
    #[error("unsupported version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },
    #[error("truncated data: needed {needed} bytes, {available} available")]
    Truncated { needed: usize, available: usize },
    #[error("bad maxval {0} (only 255 is supported)")]
    BadMaxval(u32),
    #[error("malformed header: {0}")]
    Header(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("training diverged: {0}")]
    NonFinite(String),

    #[error("{path}: {source}")]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },

    #[error(transparent)]
    Decode(#[from] FormatError),

    #[error("config: {0}")]
    Config(String),

    #[error(
        "no sensitivity available: run `sensitivity` or set clip_radius with sensitivity_mode=clip"
    )]
    MissingSensitivity,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, source: FormatError) -> Self {
        Error::Format {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }

    /// Short machine-parseable category used by the command-line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::DimensionMismatch { .. } => "dimension",
            Error::NotSymmetric { .. } => "not-symmetric",
            Error::NonFinite(_) => "non-finite",
            Error::Format { .. } | Error::Decode(_) => "format",
            Error::Config(_) => "config",
            Error::MissingSensitivity => "missing-sensitivity",
            Error::Io { .. } => "io",
        }
    }
}
