use std::fmt;

use serde::Serialize;

/// Failure classes with distinct exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Numerics(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerics(_) => 3,
            Self::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Numerics(_) => "numerics",
            Self::Io(_) => "io",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Config(m) | Self::Numerics(m) | Self::Io(m) => m,
        }
    }

    /// Machine-readable form printed on failure.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            error: &'a str,
            message: &'a str,
            exit_code: i32,
        }
        serde_json::to_string(&Report {
            error: self.kind(),
            message: self.message(),
            exit_code: self.exit_code(),
        })
        .expect("error report serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<displacemon::Error> for CliError {
    fn from(e: displacemon::Error) -> Self {
        use displacemon::Error as E;
        match e {
            E::InvalidGeometry(_) | E::InvalidParameter(_) | E::SingularBias { .. } => Self::Config(e.to_string()),
            _ => Self::Numerics(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
