use std::fmt;
use std::io;
use std::path::PathBuf;

/// Process exit statuses. Stable across releases.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VALIDATION: i32 = 2;
    pub const IO: i32 = 3;
    pub const COLLAPSE: i32 = 4;
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input: unparsable or invalid weights, out-of-range options.
    Validation(String),
    /// Reading or writing a file (or stdout) failed.
    Io {
        path: Option<PathBuf>,
        source: io::Error,
    },
    /// The particle filter lost all weight.
    Collapse(lmse_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => exit::VALIDATION,
            CliError::Io { .. } => exit::IO,
            CliError::Collapse(_) => exit::COLLAPSE,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: Some(path.into()),
            source,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "invalid input: {msg}"),
            CliError::Io {
                path: Some(path),
                source,
            } => write!(f, "{}: {source}", path.display()),
            CliError::Io { path: None, source } => write!(f, "output error: {source}"),
            CliError::Collapse(err) => write!(f, "{err}"),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Io { source, .. } => Some(source),
            CliError::Collapse(err) => Some(err),
            CliError::Validation(_) => None,
        }
    }
}

impl From<lmse_core::Error> for CliError {
    fn from(err: lmse_core::Error) -> Self {
        use lmse_core::Error as E;
        match err {
            E::ParticleCollapse { .. } | E::RunCollapse { .. } => CliError::Collapse(err),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(source: io::Error) -> Self {
        CliError::Io { path: None, source }
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        match err.into_kind() {
            csv::ErrorKind::Io(source) => CliError::Io { path: None, source },
            other => CliError::Validation(format!("{other:?}")),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
