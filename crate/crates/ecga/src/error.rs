use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modular inverse of zero")]
    InverseOfZero,
    #[error("point does not lie on curve `{0}`")]
    OffCurvePoint(String),
    #[error("scalar multiple {0} of the base point is the point at infinity")]
    OrderExhausted(u64),
    #[error("curve `{0}` is singular: 4a^3 + 27b^2 = 0 (mod p)")]
    SingularCurve(String),
    #[error("base point of curve `{0}` does not satisfy the curve equation")]
    BasePointOffCurve(String),
    #[error("image has no pixels")]
    EmptyImage,
    #[error("empty bit string")]
    EmptyBitString,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("sequence of length {len} is too short, need at least {min}")]
    SequenceTooShort { len: usize, min: usize },
    #[error("index {index} out of range [1, {len}]")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("mask seed must be at least 32 bytes, got {0}")]
    SeedTooShort(usize),
    #[error("symbol {symbol} does not fit in {m} bits")]
    SymbolOutOfRange { symbol: u16, m: u8 },
    #[error("bits per symbol must lie in [1, 16], got {0}")]
    InvalidSymbolWidth(u8),
    #[error("phi, psi and varphi must be positive")]
    InvalidTriplet,
    #[error("invalid crossover plan: {0}")]
    InvalidPlan(String),
    #[error("all rescaled-range windows have zero variance")]
    DegenerateSeries,
    #[error("sequence has zero variance")]
    ConstantSequence,
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("unsupported pixel depth: maxval {0} (only 255 is supported)")]
    UnsupportedDepth(u32),
    #[error("corrupt image: {0}")]
    CorruptImage(String),
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("invalid curve file: {0}")]
    InvalidCurveFile(String),
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
