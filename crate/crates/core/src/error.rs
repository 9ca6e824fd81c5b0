use std::io;

use thiserror::Error;

use crate::wordnet::{PartOfSpeech, SynsetId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("dangling pointer to {0}")]
    DanglingPointer(String),

    #[error("hypernym cycle detected: {}", witness.join(" -> "))]
    CycleDetected { witness: Vec<String> },

    #[error("unknown synset {0}")]
    UnknownSynset(String),

    #[error("inconsistent database: {0}")]
    Inconsistent(String),

    #[error("canonical name collision: {0}")]
    NameCollision(String),

    #[error("cannot compare a {0} synset with a {1} synset")]
    CrossPos(PartOfSpeech, PartOfSpeech),

    #[error("{0} is unreachable from the taxonomy root")]
    Unreachable(SynsetId),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("non-finite update at row {row} ({name}), dim {dim}: {value}")]
    NonFiniteUpdate {
        row: usize,
        name: String,
        dim: usize,
        value: f64,
    },

    #[error("corrupt checkpoint at byte {offset}: {reason}")]
    CorruptCheckpoint { offset: u64, reason: String },

    #[error("malformed row {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("missing column {0}")]
    MissingColumn(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("database cannot be written as a fixture: {0}")]
    Unrepresentable(String),
}

impl Error {
    pub(crate) fn malformed(line: usize, reason: impl Into<String>) -> Self {
        Error::MalformedLine {
            line,
            reason: reason.into(),
        }
    }
}
