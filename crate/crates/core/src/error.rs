use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("frame {index} ({path}): {reason}")]
    Image {
        index: usize,
        path: PathBuf,
        reason: String,
    },

    #[error("{path}: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error("duplicate gaze sample for frame {0}")]
    DuplicateFrame(usize),

    #[error("segment {label:?} has start {start} after end {end}")]
    InvertedSegment {
        label: String,
        start: usize,
        end: usize,
    },

    #[error("segments [{}, {}] and [{}, {}] overlap", .first.0, .first.1, .second.0, .second.1)]
    Overlap {
        first: (usize, usize),
        second: (usize, usize),
    },

    #[error("segments must be sorted and disjoint: {0}")]
    Unsorted(String),

    #[error("empty {0} sample list")]
    EmptySamples(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by a bad configuration rather than bad input data.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
