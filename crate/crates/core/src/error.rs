use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("column `{0}` not found in header")]
    MissingColumn(String),

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("log contains no events")]
    EmptyLog,

    #[error("malformed XML: {0}")]
    MalformedXml(String),

    #[error("event {event} of trace `{case_id}` has no concept:name")]
    MissingConceptName { case_id: String, event: usize },

    #[error("hierarchy row {row} has {found} columns, expected {expected}")]
    InconsistentDepth {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("hierarchy level {level}: `{value}` generalizes to both `{first}` and `{second}`")]
    NonFunctionalLevel {
        level: usize,
        value: String,
        first: String,
        second: String,
    },

    #[error("hierarchy leaf `{0}` appears more than once")]
    DuplicateLeaf(String),

    #[error("hierarchy row {row} (leaf `{leaf}`) does not end in the wildcard")]
    MissingRoot { row: usize, leaf: String },

    #[error("hierarchy has no rows")]
    EmptyHierarchy,

    #[error("level {level} exceeds the depth {depth} of the {perspective} hierarchy")]
    LevelOutOfRange {
        perspective: String,
        level: usize,
        depth: usize,
    },

    #[error("value `{value}` is unknown to the hierarchy for {attribute}")]
    UnknownValue { attribute: String, value: String },

    #[error("attribute `{0}` is not part of the log schema")]
    UnknownAttribute(String),

    #[error("log has {traces} traces, fewer than k = {k}")]
    InsufficientTraces { traces: usize, k: usize },

    #[error("trace `{case_id}`: original event {index} has no counterpart in the anonymized log")]
    LinkageBroken { case_id: String, index: usize },

    #[error("invalid log: {0}")]
    InvalidLog(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::UnknownValue { .. }
            | Error::UnknownAttribute(_)
            | Error::LevelOutOfRange { .. } => 2,
            Error::MissingColumn(_)
            | Error::RaggedRow { .. }
            | Error::EmptyLog
            | Error::MalformedXml(_)
            | Error::MissingConceptName { .. }
            | Error::InconsistentDepth { .. }
            | Error::NonFunctionalLevel { .. }
            | Error::DuplicateLeaf(_)
            | Error::MissingRoot { .. }
            | Error::EmptyHierarchy
            | Error::LinkageBroken { .. }
            | Error::InvalidLog(_)
            | Error::Csv(_) => 3,
            Error::InsufficientTraces { .. } => 4,
            Error::Io { .. } => 5,
            Error::Internal(_) => 1,
        }
    }
}
