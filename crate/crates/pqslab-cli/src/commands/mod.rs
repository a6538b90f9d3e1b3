pub mod criteria;
pub mod estimate;
pub mod figure;
pub mod state;

use crate::config::ConfigError;

/// Command failures split by exit code: 2 for configuration, 3 for numerics.
#[derive(Debug)]
pub enum AppError {
    Config(String),
    Numerical(String),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Config(m) => write!(f, "config error: {m}"),
            AppError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Config(e.message)
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Config(format!("io: {e}"))
    }
}

impl From<pqslab::SweepError> for AppError {
    fn from(e: pqslab::SweepError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<pqslab::MeasureError> for AppError {
    fn from(e: pqslab::MeasureError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<pqslab::StateError> for AppError {
    fn from(e: pqslab::StateError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<pqslab::EnsembleError> for AppError {
    fn from(e: pqslab::EnsembleError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<pqslab::CriteriaError> for AppError {
    fn from(e: pqslab::CriteriaError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<serde_json::Error> for AppError {
    fn from(e: serde_json::Error) -> Self {
        AppError::Numerical(format!("serialization: {e}"))
    }
}
