use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),
    #[error("unsupported WAV encoding in {path}: {detail}")]
    UnsupportedEncoding { path: PathBuf, detail: String },
    #[error("zero-length data in {0}")]
    ZeroLengthData(PathBuf),
    #[error("WAV I/O error on {path}: {source}")]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("sample rate mismatch: {left} Hz vs {right} Hz")]
    RateMismatch { left: u32, right: u32 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("silent signal")]
    SilentSignal,
    #[error("non-finite sample value")]
    NonFinite,
    #[error("degenerate window normalization at sample {0}")]
    DegenerateNormalization(usize),
    #[error("infeasible absorption: rt60 {rt60_s} s cannot be reached in this room")]
    InfeasibleAbsorption { rt60_s: f64 },
    #[error("source coincides with microphone")]
    CoincidentSourceMic,
    #[error("position outside room: {0}")]
    OutsideRoom(String),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("insufficient decay range: {0:.1} dB available")]
    InsufficientDecay(f64),
    #[error("singular normal equations at bin {0}")]
    Singular(usize),
    #[error("signal too short: {0}")]
    TooShort(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("zero-energy input")]
    ZeroEnergy,
    #[error("config parse error: {0}")]
    ConfigParse(String),
    #[error("report parse error: {0}")]
    Report(String),
    #[error("usage: {0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
