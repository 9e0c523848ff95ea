use thiserror::Error;

/// Errors surfaced by weight validation, enumeration guards and numeric domain checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rank must be at least 1")]
    ZeroRank,

    #[error("tensor power must be at least 1")]
    ZeroTensorPower,

    #[error("coordinate list has length {got}, expected rank {expected}")]
    RankMismatch { expected: usize, got: usize },

    #[error("weight is not dominant: entry {index} increases")]
    NotDominant { index: usize },

    #[error("doubled orthogonal coordinates mix parities")]
    MixedParity,

    #[error("a-coordinates must be strictly decreasing (violation at index {index})")]
    NotStrictlyDecreasing { index: usize },

    #[error("a-coordinates must be positive")]
    NonPositive,

    #[error(
        "a-coordinates have parity {got}, but tensor power {tensor_power} requires {expected}"
    )]
    ParityMismatch {
        tensor_power: u64,
        expected: &'static str,
        got: &'static str,
    },

    #[error("first a-coordinate {a1} exceeds the reachable cone bound {bound}")]
    OutsideCone { a1: u64, bound: u64 },

    #[error("enumeration would visit {candidates} candidates, above the cap {cap}")]
    EnumerationCap { candidates: u128, cap: u128 },

    #[error("dynamic-programming oracle limited to n <= {max_n}, N <= {max_power}")]
    OracleGuard { max_n: u32, max_power: u64 },

    #[error("parameter c = {c} out of range: {reason}")]
    BadShapeParameter { c: f64, reason: String },

    #[error("evaluation point {x} outside domain [-{half_width}, {half_width}]")]
    OutsideDomain { x: f64, half_width: f64 },

    #[error("profiles use mismatched ratios c = {left} vs c = {right}")]
    MismatchedRatio { left: f64, right: f64 },

    #[error("deviation data invalid: {reason}")]
    BadDeviation { reason: String },

    #[error("sampler parameter invalid: {reason}")]
    BadSamplerParameter { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
