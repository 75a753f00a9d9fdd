use std::fmt;

/// Failure classes with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit code 2.
    Param(String),
    /// Quadrature or sampling did not reach the requested accuracy; exit code 3.
    Numeric(String),
    /// Could not write results; exit code 1.
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Param(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Param(m) | CliError::Numeric(m) => m.clone(),
            CliError::Io(e) => e.to_string(),
        }
    }

    /// Keeps the more severe of two failures, parameter errors first.
    pub fn worse(self, other: CliError) -> CliError {
        match (&self, &other) {
            (CliError::Param(_), _) => self,
            (_, CliError::Param(_)) => other,
            (CliError::Numeric(_), _) => self,
            _ => other,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message())
    }
}

impl std::error::Error for CliError {}

impl From<wqed::Error> for CliError {
    fn from(e: wqed::Error) -> Self {
        match e {
            wqed::Error::NoConvergence { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Param(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
