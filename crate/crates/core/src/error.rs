use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("shape mismatch: expected dim {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no embedding for {model_id}/{modality}/{key:?} and no service configured")]
    MissingEmbedding {
        model_id: String,
        modality: String,
        key: String,
    },

    #[error("provider error: {0}")]
    Provider(String),

    #[error("request to {endpoint} failed after {attempts} attempt(s): {message}")]
    Retryable {
        endpoint: String,
        attempts: u32,
        message: String,
    },

    #[error("augmentation unavailable for context {0:?}: not cached and no generation service configured")]
    AugmentationUnavailable(String),

    #[error("translation unavailable for {0:?}: not cached and no translation service configured")]
    TranslationUnavailable(String),

    #[error("could not parse any definitions from response: {raw:?}")]
    NoDefinitions { raw: String },

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("build error: {0}")]
    Build(String),

    #[error("scoring candidate {candidate:?}{}: {source}", gloss.as_ref().map(|g| format!(" with gloss {g:?}")).unwrap_or_default())]
    Scoring {
        candidate: String,
        gloss: Option<String>,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse failure classes, used by the command line to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Provider,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(source_name: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) => ErrorClass::Config,
            Error::MissingEmbedding { .. }
            | Error::Provider(_)
            | Error::Retryable { .. }
            | Error::AugmentationUnavailable(_)
            | Error::TranslationUnavailable(_)
            | Error::NoDefinitions { .. } => ErrorClass::Provider,
            Error::Scoring { source, .. } => source.class(),
            _ => ErrorClass::Data,
        }
    }

    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::Retryable { .. })
    }
}
