use thiserror::Error;

/// Errors raised by the toolkit. Domain errors describe invalid inputs;
/// `Inconsistency` means an identity that must hold exactly was violated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} must be an odd prime >= 3")]
    EvenOrTooSmall(u64),
    #[error("modulus {value} exceeds the supported maximum {max}")]
    ModulusTooLarge { value: u64, max: u64 },
    #[error("window (H={offset}, N={len}) is invalid for p={p}: {reason}")]
    WindowOutOfRange {
        p: u64,
        offset: u64,
        len: u64,
        reason: &'static str,
    },
    #[error("ell={0} is outside 1..=8")]
    EllOutOfRange(u32),
    #[error("multiplier {0} is not invertible modulo p")]
    NonInvertibleMultiplier(u64),
    #[error("{what}={value} is out of range ({expected})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        expected: String,
    },
    #[error("J={j} must lie in 1..={max}")]
    JOutOfRange { j: u64, max: u64 },
    #[error("{0} is not a prime divisor of p-1")]
    InvalidSubset(u64),
    #[error("bad range [{lo}, {hi}]")]
    BadRange { lo: u64, hi: u64 },
    #[error("parameters outside the validity domain of {kind}: {reason}")]
    DomainViolation { kind: &'static str, reason: String },
    #[error("enumeration size {size} exceeds the oracle limit {limit}")]
    TooLarge { size: u128, limit: u128 },
    #[error("sum N={n} violates N*ell < p (p={p}, ell={ell}); pass the large-sum flag to lift it")]
    SumOutOfRange { n: u64, ell: u32, p: u64 },
    #[error("convolution of length {0} is beyond the supported transform size")]
    ConvolutionTooLarge(usize),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
