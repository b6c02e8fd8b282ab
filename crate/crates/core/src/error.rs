use std::path::PathBuf;

use thiserror::Error;

/// Reasons a sentence cannot be turned into a usable dependency tree.
///
/// These are not fatal for a corpus run: the filter records them in the skip
/// log under [`TreeError::reason`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("expected exactly one root, found {0}")]
    BadRoot(usize),
    #[error("token {0} is part of a head cycle")]
    Cyclic(usize),
    #[error("token {position} points to head {head} outside the sentence")]
    DanglingHead { position: usize, head: usize },
    #[error("subtree of root dependent {0} is not contiguous")]
    NonContiguous(usize),
    #[error("subtree of root dependent {0} straddles the verb")]
    Straddling(usize),
}

impl TreeError {
    /// Machine-readable skip-log reason.
    pub fn reason(&self) -> &'static str {
        match self {
            TreeError::BadRoot(_) => "bad-root",
            TreeError::Cyclic(_) => "cyclic",
            TreeError::DanglingHead { .. } => "dangling-head",
            TreeError::NonContiguous(_) => "non-contiguous-constituent",
            TreeError::Straddling(_) => "straddling-constituent",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}:{line}: {msg}")]
    Parse {
        source_name: String,
        line: usize,
        msg: String,
    },
    #[error("{source_name}:{line}: sentence structure: {msg}")]
    Structure {
        source_name: String,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("design matrix is rank deficient: column `{0}` is collinear with earlier columns")]
    RankDeficient(String),
    #[error("{0}")]
    Undefined(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("data: {0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Table {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for usage/config problems, 2 for data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
