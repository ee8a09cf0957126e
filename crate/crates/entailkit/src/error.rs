use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Format {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid label at line {line}")]
    InvalidLabel { line: usize },

    #[error("duplicate pair id `{id}` at line {line}")]
    DuplicateId { id: String, line: usize },

    #[error("statement `{id}`: index {index} out of range (statement has {len} tokens)")]
    IndexOutOfRange {
        id: String,
        index: usize,
        len: usize,
    },

    #[error("not a numeral: `{0}`")]
    NotANumeral(String),

    #[error("numeral overflow: `{0}` exceeds the supported integer range")]
    NumeralOverflow(String),

    #[error("undefined DICE: both collections are empty")]
    UndefinedDice,

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("feature `{0}` missing from vector")]
    MissingFeature(String),

    #[error("unknown feature name `{0}`")]
    UnknownFeature(String),

    #[error("non-finite value for feature `{0}`")]
    NonFiniteFeature(String),

    #[error("grid has {size} points, above the cap of {cap}; use coarser candidate lists")]
    GridTooLarge { size: usize, cap: usize },

    #[error("training data is empty")]
    EmptyData,

    #[error("training data must contain both Y and N labels")]
    SingleClassData,

    #[error("prediction and gold lists differ in length ({preds} vs {golds})")]
    LengthMismatch { preds: usize, golds: usize },

    #[error("cannot split {size} items into {k} non-empty stratified folds")]
    BadFoldCount { size: usize, k: usize },

    #[error("model file `{path}`: {msg}")]
    ModelFormat { path: PathBuf, msg: String },

    #[error("unsupported model version `{0}` (expected `entailkit-model v1`)")]
    ModelVersion(String),

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
