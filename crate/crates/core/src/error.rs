//! Crate-level error type and its coarse classification.

use std::path::PathBuf;

use crate::components::ComponentsError;
use crate::config::ConfigError;
use crate::ingest::{IngestError, SourceError};
use crate::sentiment::SentimentError;
use crate::stats::StatsError;
use crate::synth::SynthError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Sentiment(#[from] SentimentError),
    #[error(transparent)]
    Components(#[from] ComponentsError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("missing fixtures for subject {subject:?}: {path}")]
    MissingFixtures { subject: String, path: PathBuf },
    #[error("subject {subject:?} has zero iterations")]
    NoIterations { subject: String },
    #[error("group {group:?} has {count} subjects; at least 3 are required for a correlation")]
    TooFewSubjects { group: String, count: usize },
    #[error("need at least 2 groups to compare, got {0}")]
    TooFewGroups(usize),
    #[error("group {group:?}: {source}")]
    Group {
        group: String,
        #[source]
        source: Box<Error>,
    },
    #[error("subject {subject:?}: {source}")]
    Subject {
        subject: String,
        #[source]
        source: Box<Error>,
    },
    #[error("malformed table {path}: {message}")]
    Table { path: PathBuf, message: String },
    #[error("output directory name is empty")]
    EmptyOutDir,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Serialize(String),
}

/// Broad failure category, used by the command-line front end to pick an
/// exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numeric,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_group(self, group: &str) -> Self {
        Error::Group {
            group: group.to_string(),
            source: Box::new(self),
        }
    }

    pub fn in_subject(self, subject: &str) -> Self {
        Error::Subject {
            subject: subject.to_string(),
            source: Box::new(self),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) | Error::EmptyOutDir | Error::TooFewGroups(_) => ErrorClass::Usage,
            Error::Stats(_) | Error::Components(_) => ErrorClass::Numeric,
            Error::Group { source, .. } | Error::Subject { source, .. } => source.class(),
            _ => ErrorClass::Data,
        }
    }
}
