use thiserror::Error;

/// Errors raised by construction, coding and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid channel parameter: {0}")]
    ChannelParameter(String),

    #[error("cannot parse channel spec `{0}` (expected bec:<e>, bsc:<p> or biawgn:<sigma>)")]
    ChannelSpec(String),

    #[error("channels of different kinds cannot be ordered by degradation")]
    MixedChannelKinds,

    #[error("symbol {symbol} is not in the output alphabet of {channel}")]
    InvalidSymbol { channel: String, symbol: String },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("frozen and information positions do not partition [1, {n}]: {detail}")]
    Partition { n: usize, detail: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("rate schedule: {0}")]
    Schedule(String),

    /// A violated PCP condition, named as (c.1), (c.2), (c.3) or by the
    /// identity that failed.
    #[error("condition {condition} violated: {detail}")]
    Condition {
        condition: &'static str,
        detail: String,
    },

    #[error("invalid hex string: {0}")]
    Hex(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn condition(condition: &'static str, detail: impl Into<String>) -> Self {
        Error::Condition {
            condition,
            detail: detail.into(),
        }
    }
}
