use std::io;

/// Errors raised anywhere in the feature-field pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate direction")]
    DegenerateDirection,

    #[error("outside disc: normalized radius {radius}")]
    OutsideDisc { radius: f64 },

    #[error("too close to singular point")]
    NearSingularity,

    #[error("degenerate blend")]
    DegenerateBlend,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("region mismatch: missing {missing:?}, extra {extra:?}")]
    RegionMismatch {
        missing: Vec<String>,
        extra: Vec<String>,
    },

    #[error("invalid camera: {0}")]
    InvalidCamera(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unified storage is shared with live split views")]
    StorageShared,

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
