use thiserror::Error;

/// Errors raised by the algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: String, right: String },
    #[error("{0} is not a unit")]
    NotUnit(u64),
    #[error("valuation {valuation} is smaller than the requested divisor p^{requested}")]
    InsufficientValuation { valuation: u32, requested: u32 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("level {level} out of range 1..={max}")]
    LevelOutOfRange { level: u32, max: u32 },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("ring mismatch")]
    RingMismatch,
    #[error("unsupported coefficient ring: {0}")]
    UnsupportedRing(&'static str),
    #[error("no symplectic pairing configured on this ring")]
    NoPairing,
    #[error("element is not central: {0}")]
    NotCentral(String),
    #[error("structure table guard exceeded: p={p}, length={length}")]
    GuardExceeded { p: u64, length: usize },
    #[error("no finite monomial basis and no degree cap")]
    NoFiniteBasis,
    #[error("degree {degree} exceeds cap {cap}")]
    DegreeExceedsCap { degree: u32, cap: u32 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
