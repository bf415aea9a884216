use std::path::Path;

use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io { path: String, message: String },
    Solver(radmps_core::Error),
    Usage(String),
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Solver(_) => "solver",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Solver(_) => 4,
        }
    }

    pub fn report(&self) -> ErrorReport {
        let (message, lambda) = match self {
            CliError::Config(m) | CliError::Usage(m) => (m.clone(), None),
            CliError::Io { path, message } => (format!("{path}: {message}"), None),
            CliError::Solver(e) => (
                e.to_string(),
                match e {
                    radmps_core::Error::AtLambda { lambda, .. } | radmps_core::Error::SpuriousMinimum { lambda, .. } => {
                        Some(*lambda)
                    }
                    _ => None,
                },
            ),
        };
        ErrorReport {
            error: ErrorBody {
                kind: self.kind(),
                message,
                lambda,
            },
        }
    }
}

impl From<radmps_core::Error> for CliError {
    fn from(e: radmps_core::Error) -> Self {
        match e {
            radmps_core::Error::InvalidParameter(m) => CliError::Config(m),
            e => CliError::Solver(e),
        }
    }
}

#[derive(Serialize)]
pub struct ErrorReport {
    pub error: ErrorBody,
}

#[derive(Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}
