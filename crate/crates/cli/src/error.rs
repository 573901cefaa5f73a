use std::fmt;
use std::path::Path;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug)]
pub enum CliError {
    Core(ppg2ecg::Error),
    /// Bad arguments, missing inputs or a missing external tool.
    Input(String),
    /// A child process exited with this code.
    Child(i32, String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(ppg2ecg::Error::NonFinite { .. }) => 3,
            CliError::Core(ppg2ecg::Error::FingerprintMismatch { .. }) => 4,
            CliError::Core(_) | CliError::Input(_) => 2,
            CliError::Child(code, _) => *code,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Child(code, m) => write!(f, "{m} (exit code {code})"),
        }
    }
}

impl From<ppg2ecg::Error> for CliError {
    fn from(e: ppg2ecg::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}
