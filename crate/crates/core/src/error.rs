use std::fmt;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Decoding failures for the HDR container formats.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported pixel ordering `{0}` (only `-Y h +X w` is supported)")]
    UnsupportedOrientation(String),
    #[error("unsupported pixel format `{0}`")]
    UnsupportedFormat(String),
    #[error("truncated pixel data in scanline {row}")]
    TruncatedScanline { row: usize },
    #[error("run-length run overruns scanline {row}")]
    RunOverrun { row: usize },
    #[error("grayscale PFM (`Pf`) is not supported, only 3-channel `PF` files")]
    GrayscalePfm,
    #[error("invalid sample {value} at index {index} (must be finite and non-negative)")]
    InvalidSample { index: usize, value: f32 },
}

/// Pipeline stage, used to tag errors raised inside [`crate::tonemap_pipeline`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    ColorConversion,
    ViewingConditions,
    Brightness,
    Decomposition,
    KeyEstimation,
    ToneCompression,
    Appearance,
    InverseModel,
    Glare,
    DisplayEncoding,
}

impl Stage {
    pub const ALL: [Stage; 10] = [
        Stage::ColorConversion,
        Stage::ViewingConditions,
        Stage::Brightness,
        Stage::Decomposition,
        Stage::KeyEstimation,
        Stage::ToneCompression,
        Stage::Appearance,
        Stage::InverseModel,
        Stage::Glare,
        Stage::DisplayEncoding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::ColorConversion => "color_conversion",
            Stage::ViewingConditions => "viewing_conditions",
            Stage::Brightness => "brightness",
            Stage::Decomposition => "decomposition",
            Stage::KeyEstimation => "key_estimation",
            Stage::ToneCompression => "tone_compression",
            Stage::Appearance => "appearance",
            Stage::InverseModel => "inverse_model",
            Stage::Glare => "glare",
            Stage::DisplayEncoding => "display_encoding",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("expected a {expected} image, got {actual}")]
    ColorSpaceMismatch {
        expected: crate::image::ColorSpace,
        actual: crate::image::ColorSpace,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: png: {message}", path.display())]
    Png { path: PathBuf, message: String },
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at(self, stage: Stage) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The pipeline stage that raised this error, if any.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}
