use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid raster: {0}")]
    InvalidRaster(String),
    #[error("invalid bounding box ({x_min}, {y_min}, {x_max}, {y_max})")]
    InvalidBox {
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
    },
    #[error("invalid annotation: {0}")]
    InvalidAnnotation(String),
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("crop is degenerate after clipping to the image bounds")]
    DegenerateCrop,
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("centerline has {0} pixels, at least 3 are required")]
    DegenerateMask(usize),
    #[error("no ground truth annotations, metric is undefined")]
    NoGroundTruth,
    #[error("unknown image id `{0}`")]
    UnknownImage(String),
    #[error("ground truth lesion in image `{0}` has no MLD point")]
    MissingMldPoint(String),
    #[error("undefined metric: {0}")]
    UndefinedMetric(&'static str),
    #[error("sample must not be empty")]
    EmptySample,
    #[error("at least {needed} samples are required, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid augmentation tiers: {0}")]
    InvalidTiers(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
