use thiserror::Error;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {field}: {message}")]
    ConfigInvalid { field: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error(transparent)]
    Library(#[from] exptest::Error),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::ConfigInvalid { field: field.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigInvalid { .. } => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
            CliError::Library(e) => e.exit_code(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
