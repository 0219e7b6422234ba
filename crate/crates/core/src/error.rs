use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("raster dimensions must be positive, got {0}x{1}")]
    EmptyRaster(usize, usize),

    #[error("buffer length {len} does not match {width}x{height}")]
    BufferLength {
        width: usize,
        height: usize,
        len: usize,
    },

    #[error("sample {value} at index {index} is outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },

    #[error("byte {value} at index {index} is not a trimap value (0, 128 or 255)")]
    InvalidTrimapValue { index: usize, value: u8 },

    #[error("{path}: expected {expected} channel(s), found {found}")]
    ChannelCount {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("{path}: unsupported pixel layout {layout}")]
    UnsupportedLayout { path: PathBuf, layout: String },

    #[error("{width}x{height} raster is too small for a {levels}-level pyramid")]
    PyramidTooSmall {
        width: usize,
        height: usize,
        levels: usize,
    },

    #[error("pyramid needs at least one level")]
    ZeroLevels,

    #[error("region contains no pixels")]
    EmptyRegion,

    #[error("trimap has no unknown pixels")]
    NoUnknownPixels,

    #[error("crop size {0} is not one of 320, 480, 640")]
    InvalidCropSize(usize),

    #[error("crop {size}x{size} at ({x}, {y}) exceeds {width}x{height} source")]
    CropOutOfBounds {
        x: usize,
        y: usize,
        size: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hair parsing mask and fur flag are mutually exclusive")]
    ConflictingClassHints,

    #[error("foreground {0} has no matching alpha")]
    UnpairedForeground(PathBuf),

    #[error("alpha {0} has no matching foreground")]
    UnpairedAlpha(PathBuf),

    #[error("no images found in {0}")]
    EmptyDirectory(PathBuf),

    #[error("bad probabilistic trimap magic")]
    BadMagic,

    #[error("probabilistic trimap truncated: expected {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("probabilistic trimap has {extra} trailing byte(s) beyond its header dimensions")]
    TrailingBytes { extra: usize },

    #[error("probabilistic trimap sample at index {index} is invalid ({value})")]
    InvalidProbability { index: usize, value: f32 },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest line {line}: {source}")]
    Manifest {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
