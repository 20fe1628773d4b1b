use std::path::PathBuf;

use crate::grammar::ParseError;

/// Errors raised by the toolkit. Parse failures of model text are carried as
/// [`ParseError`] so callers can recover the kind and byte offset.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate polygon: {0} vertices, need at least 3")]
    DegeneratePolygon(usize),

    #[error("polygon has zero signed area")]
    ZeroArea,

    #[error("empty target: mask has no foreground pixels")]
    EmptyTarget,

    #[error("invalid image size {width}x{height}")]
    InvalidSize { width: u32, height: u32 },

    #[error("size mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    SizeMismatch {
        left_w: u32,
        left_h: u32,
        right_w: u32,
        right_h: u32,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("malformed RLE at offset {offset}: {detail}")]
    Rle { offset: usize, detail: String },

    #[error("{0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Format(String),

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn image(path: impl Into<PathBuf>, source: image::ImageError) -> Self {
        Error::Image {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by malformed or unusable input data, as opposed
    /// to caller misuse or internal faults.
    pub fn is_input_format(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::Rle { .. }
                | Error::Format(_)
                | Error::Json(_)
                | Error::Image { .. }
                | Error::Io { .. }
                | Error::EmptyTarget
                | Error::DuplicateId(_)
                | Error::SizeMismatch { .. }
                | Error::InvalidSize { .. }
        )
    }
}
