use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid step {dt} too coarse: must not exceed {limit} (a quarter of the shortest support onset)")]
    GridTooCoarse { dt: f64, limit: f64 },

    #[error("tail fit failed: {0}")]
    FitFailure(String),

    #[error("expected {expected:.0} live sessions exceeds the memory budget of {budget}")]
    MemoryBudget { expected: f64, budget: f64 },

    #[error("parameters fall in {0}, for which no limit law is implemented")]
    UnsupportedCase(String),

    #[error("integral did not converge: tail correction {tail:.4e} is {ratio:.1}% of the head integral {head:.4e}")]
    NonConvergence { head: f64, tail: f64, ratio: f64 },

    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("unsupported wavelet order {0} (supported: 1..=10)")]
    InvalidWaveletOrder(usize),

    #[error("insufficient octaves: {0}")]
    InsufficientOctaves(String),

    #[error("degenerate logscale diagram: octave {0} has zero detail energy")]
    DegenerateDiagram(u32),

    #[error("circulant embedding failed: eigenvalue {value:.3e} at index {index}")]
    EmbeddingFailure { index: usize, value: f64 },

    #[error("unknown series {0} (expected 1..=4)")]
    UnknownSeries(u32),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(#[from] toml::de::Error),

    #[error("config: {0}")]
    ConfigWrite(#[from] toml::ser::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
