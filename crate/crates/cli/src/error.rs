use thiserror::Error;

/// A document that cannot be turned into valid objects. Always exit code 2.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{}{message}", if object.is_empty() { String::new() } else { format!("object {object:?}: ") })]
pub struct LoadError {
    pub object: String,
    pub message: String,
}

impl LoadError {
    pub fn new(object: &str, message: impl Into<String>) -> Self {
        LoadError { object: object.to_string(), message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: malformed document: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("{path}: {source}")]
    Load { path: String, source: LoadError },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}
