use std::fmt;
use std::path::{Path, PathBuf};

use su2_tomography::Error;

/// Failure of a subcommand, carrying the process exit code class.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or arguments; `path` names the offending field.
    Config { path: String, message: String },
    /// Numeric or protocol failure inside the pipeline.
    Numeric(Error),
    /// Reading, writing or parsing a file.
    Io { file: PathBuf, source: Error },
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl fmt::Display) -> Self {
        CliError::Config { path: path.into(), message: message.to_string() }
    }

    pub fn io(file: &Path, source: impl Into<Error>) -> Self {
        CliError::Io { file: file.to_path_buf(), source: source.into() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numeric(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { path, message } if path.is_empty() => write!(f, "config error: {message}"),
            CliError::Config { path, message } => write!(f, "config error at {path}: {message}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io { file, source } => write!(f, "{}: {source}", file.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Attaches a file name to I/O and parse failures; numeric errors pass
/// through unchanged.
pub trait FileContext<T> {
    fn for_file(self, file: &Path) -> CliResult<T>;
}

impl<T> FileContext<T> for Result<T, Error> {
    fn for_file(self, file: &Path) -> CliResult<T> {
        self.map_err(|e| match e {
            Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::Parse { .. } => CliError::io(file, e),
            other => CliError::Numeric(other),
        })
    }
}

impl<T> FileContext<T> for Result<T, std::io::Error> {
    fn for_file(self, file: &Path) -> CliResult<T> {
        self.map_err(|e| CliError::io(file, e))
    }
}
