use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RasterError {
    #[error("no band matches the selection")]
    EmptySelection,
    #[error("band selection expected {expected} bands, got {actual}")]
    CountMismatch { expected: usize, actual: usize },
    #[error("no valid pixels to compute statistics over")]
    NoValidPixels,
    #[error("cubes do not share a wavelength grid")]
    WavelengthMismatch,
    #[error("band count mismatch: expected {expected}, got {actual}")]
    BandCountMismatch { expected: usize, actual: usize },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("wavelengths must be finite and strictly increasing")]
    InvalidWavelengths,
    #[error("invalid band selection: {0}")]
    InvalidSelection(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("GLT entry at ortho pixel ({row}, {col}) is out of range")]
    OutOfRangeEntry { row: usize, col: usize },
    #[error("no seed pixels inside the fill region")]
    NoSeedPixels,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("stride {stride} must satisfy 0 < stride <= tile size {size}")]
    BadStride { stride: usize, size: usize },
    #[error("jitter offset ({0}, {1}) exceeds half the tile size")]
    OffsetTooLarge(i64, i64),
    #[error("need at least 3 images to split, got {0}")]
    TooFewImages(usize),
    #[error("split fractions must be non-negative and sum to 1, got {0:?}")]
    BadFractions((f64, f64, f64)),
    #[error("duplicate image id {0:?}")]
    DuplicateImageId(String),
    #[error("unknown image id {0:?}")]
    UnknownImage(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("background covariance is singular after loading (group {group})")]
    SingularCovariance { group: usize },
    #[error("need at least {needed} valid pixels, found {found}")]
    TooFewPixels { needed: usize, found: usize },
    #[error("target signature is invalid: {0}")]
    BadSignature(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("label sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("relative improvement over a zero baseline")]
    DivisionByZero,
    #[error("no result row matches {0}")]
    MissingRow(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("distortion maps outside the source plane: {0}")]
    DistortionOutOfRange(String),
    #[error("background covariance is not symmetric positive semi-definite")]
    InvalidCovariance,
    #[error("invalid scene spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("malformed header: {0}")]
    Header(String),
    #[error("payload truncated: expected {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Crate-level error carrying the originating module as a prefix.
#[derive(Debug, Error)]
pub enum Error {
    #[error("raster: {0}")]
    Raster(#[from] RasterError),
    #[error("geometry: {0}")]
    Geometry(#[from] GeometryError),
    #[error("dataset: {0}")]
    Dataset(#[from] DatasetError),
    #[error("matched-filter: {0}")]
    Filter(#[from] FilterError),
    #[error("eval: {0}")]
    Eval(#[from] EvalError),
    #[error("synth: {0}")]
    Synth(#[from] SynthError),
    #[error("format: {0}")]
    Format(#[from] FormatError),
}

impl Error {
    /// Module prefix used in machine-readable error lines.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Raster(_) => "raster",
            Error::Geometry(_) => "geometry",
            Error::Dataset(_) => "dataset",
            Error::Filter(_) => "matched-filter",
            Error::Eval(_) => "eval",
            Error::Synth(_) => "synth",
            Error::Format(_) => "format",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
