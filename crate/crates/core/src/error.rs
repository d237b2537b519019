use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("learner requires output labels")]
    MissingLabels,

    #[error("{0} used before fit")]
    NotFitted(String),

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("no data: {0}")]
    NoData(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    #[error("cannot derive a label from file name {0:?}")]
    UnlabeledFile(String),

    #[error("model format error: {0}")]
    Format(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("stage {index} ({name}): {source}")]
    Stage {
        index: usize,
        name: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Strips pipeline-stage annotations and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors caused by the environment or invocation (I/O, bad
    /// configuration) rather than by the data itself.
    pub fn is_usage(&self) -> bool {
        matches!(self.root(), Error::Io { .. } | Error::Config(_))
    }
}
