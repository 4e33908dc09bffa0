use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Pipeline stage a failure is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Relabel,
    Split,
    Scale,
    Selection,
    Balancing,
    Training,
    Prediction,
    Evaluation,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Relabel,
        Stage::Split,
        Stage::Scale,
        Stage::Selection,
        Stage::Balancing,
        Stage::Training,
        Stage::Prediction,
        Stage::Evaluation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Relabel => "relabel",
            Stage::Split => "split",
            Stage::Scale => "scale",
            Stage::Selection => "selection",
            Stage::Balancing => "balancing",
            Stage::Training => "training",
            Stage::Prediction => "prediction",
            Stage::Evaluation => "evaluation",
        }
    }

    pub fn parse(s: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|stage| stage.as_str() == s)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed or inconsistent input data (CSV, label tables, datasets).
    #[error("data error: {0}")]
    Data(String),

    #[error("invalid cell at row {row}, column '{column}': {value:?}")]
    InvalidCell {
        /// 1-based data row, not counting the header.
        row: usize,
        column: String,
        value: String,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// An argument violated an operation's contract.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("class '{0}' has no samples")]
    EmptyClass(String),

    #[error("label '{0}' is not covered by the label hierarchy")]
    UnmappedLabel(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("model file version {found} is not supported (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
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

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn at_stage(self, stage: Stage) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Broad category used by front ends to pick exit codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Config,
            Error::Stage { .. } => ErrorKind::Stage,
            Error::Io { .. } => ErrorKind::Io,
            _ => ErrorKind::Data,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Stage,
    Io,
}
