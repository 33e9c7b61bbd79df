use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported netpbm magic {0:?} (expected P4 or P5)")]
    BadMagic(String),
    #[error("bad netpbm header: {0}")]
    BadHeader(String),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("degenerate histogram: all pixels have luminance {0}; use a fixed threshold")]
    DegenerateHistogram(u8),
    #[error("bad sub-strip height {height} for image with {rows} rows")]
    BadHeight { height: usize, rows: usize },
    #[error("image has no ink pixels")]
    EmptyImage,
    #[error("angle {0} is outside the open interval (0, 180) degrees")]
    BadAngle(f64),
    #[error("invalid angle grid: {0}")]
    BadGrid(String),
    #[error("profile is not normalized (sum = {0})")]
    NotNormalized(f64),
    #[error("reshaped strip is {width}x{height}; width must be at least 5 times the height")]
    AspectTooSquare { width: usize, height: usize },
    #[error("entropy curve has {0} points; at least 3 are required")]
    CurveTooShort(usize),
    #[error("sequence of length {0} is too short for autocorrelation (need at least 4)")]
    TooShort(usize),
    #[error("sequence has zero variance (all bits equal)")]
    ZeroVariance,
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("feature configurations differ: {0:?} vs {1:?}")]
    ConfigMismatch(String, String),
    #[error("gallery is empty")]
    EmptyGallery,
    #[error("stroke leaves the image: {0}")]
    StrokeOverflow(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("bad feature file: {0}")]
    BadFeatureFile(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn at_step(step: usize, source: Error) -> Self {
        Error::AtStep { step, source: Box::new(source) }
    }

    pub(crate) fn stage(stage: &'static str, source: Error) -> Self {
        Error::Stage { stage, source: Box::new(source) }
    }

    /// The innermost error, with step and stage annotations removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } | Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}
