//! One error type across the IO layer, rendered as a single machine-parsable
//! line on stderr.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {message}")]
    Csv {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{path}: {message}")]
    File { path: String, message: String },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(#[from] cephalo_core::geometry::GeometryError),
    #[error(transparent)]
    Feature(#[from] cephalo_core::features::FeatureError),
    #[error(transparent)]
    Augment(#[from] cephalo_core::augment::AugmentError),
    #[error(transparent)]
    Model(#[from] cephalo_core::models::ModelError),
    #[error(transparent)]
    Eval(#[from] cephalo_core::eval::EvalError),
    #[error(transparent)]
    Synth(#[from] cephalo_core::synth::SynthError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn file(path: &std::path::Path, message: impl Into<String>) -> CliError {
        CliError::File {
            path: path.display().to_string(),
            message: message.into(),
        }
    }

    pub fn csv(path: &std::path::Path, line: u64, message: impl Into<String>) -> CliError {
        CliError::Csv {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }

    /// Short category tag for the machine-parsable error line.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Csv { .. } => "csv",
            CliError::File { .. } => "file",
            CliError::Config(_) => "config",
            CliError::Geometry(_) => "geometry",
            CliError::Feature(_) => "features",
            CliError::Augment(_) => "augment",
            CliError::Model(_) => "models",
            CliError::Eval(_) => "eval",
            CliError::Synth(_) => "synth",
            CliError::Io(_) => "io",
        }
    }
}
