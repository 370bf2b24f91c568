use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("symbol count must be at least 1")]
    EmptySymbols,

    #[error("modulation index h = {0} is an integer; sin(pi*h) vanishes")]
    IntegerModulationIndex(f64),

    #[error("phase response normalization off by {error:e} (tolerance {tolerance:e}); grid too coarse")]
    PulseNormalization { error: f64, tolerance: f64 },

    #[error("modulation parameters of the inputs do not match")]
    ParamsMismatch,

    #[error("length mismatch: {what} (expected {expected}, got {got})")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("tap count {taps} is not usable with a signal of {len} samples")]
    TooManyTaps { taps: usize, len: usize },

    #[error("insufficient training data: {got} averaged samples, need at least {need}")]
    InsufficientTraining { got: usize, need: usize },

    #[error("Wiener-Hopf system for polyphase branch {branch} is singular")]
    SingularBranch { branch: usize },

    #[error("sample periods differ ({0} vs {1})")]
    SamplePeriodMismatch(f64, f64),

    #[error("only {got} samples overlap after guards, need at least {need}")]
    InsufficientOverlap { got: usize, need: usize },

    #[error("window {start}..{end} lies outside a signal of {len} samples")]
    WindowOutOfRange { start: usize, end: usize, len: usize },

    #[error("component selector is empty or references a missing component ({0})")]
    BadSelector(String),

    #[error("invalid fixed-point configuration: {0}")]
    FixedPoint(String),

    #[error("malformed tap file: {0}")]
    TapFormat(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
