use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or a configuration the library rejects.
    Config(String),
    /// The report could not be written.
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn render(e: impl fmt::Display) -> Self {
        CliError::Config(format!("could not render report: {e}"))
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Io { .. } => ExitCode::from(3),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => f.write_str(msg),
            CliError::Io { path, source } => write!(f, "cannot write {}: {source}", path.display()),
        }
    }
}

impl From<hoaa::Error> for CliError {
    fn from(e: hoaa::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
