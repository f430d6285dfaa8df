use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {message}", field.as_ref().map(|f| format!(" in `{f}`")).unwrap_or_default())]
    Config { field: Option<String>, message: String },
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(equidist::Error),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: Some(field.into()),
            message: message.into(),
        }
    }

    /// 3 for configuration problems, 4 for resource limits, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 3,
            CliError::Resource(_) => 4,
            CliError::Io { .. } => 1,
            CliError::Core(e) => match e {
                equidist::Error::ResourceLimit { .. } => 4,
                equidist::Error::OutOfRange { .. }
                | equidist::Error::EmptyEigenspace { .. }
                | equidist::Error::DegenerateInput(_) => 3,
                _ => 1,
            },
        }
    }
}

impl From<equidist::Error> for CliError {
    fn from(e: equidist::Error) -> Self {
        match e {
            equidist::Error::ResourceLimit { estimate, cap } => CliError::Resource(format!(
                "covering would need about {estimate:.0} centers (cap {cap}); raise covering_check.max_centers or s"
            )),
            other => CliError::Core(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
