use thiserror::Error;

use crate::arith::Rational;

/// Errors raised by the exact-arithmetic layers and the verification drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("conductor {from} does not divide {to}")]
    NonDivisibleConductor { from: u64, to: u64 },

    #[error("{value} is not coprime to {modulus}")]
    NotCoprime { value: i64, modulus: u64 },

    #[error("series is zero up to O(q^({trunc}/{denominator}))")]
    ZeroToTruncation { trunc: i64, denominator: u64 },

    #[error("truncation {requested} cannot hold the leading term (needs more than {needed})")]
    TruncationTooSmall { requested: i64, needed: i64 },

    #[error("point {0:?} does not lie in the fiber")]
    OutsideFiber(Vec<u64>),

    #[error("incompatible operands: {0}")]
    Incompatible(String),

    #[error("value {value} has a denominator divisible by {prime}")]
    NotIntegral { value: String, prime: u64 },

    #[error("trace is undefined at level 0")]
    LevelZero,

    #[error("residue of the Eisenstein combination is {0}, expected 0")]
    NonzeroResidue(Rational),

    #[error("class contains symbols outside the Eisenstein span: {0}")]
    NotEisensteinSpan(String),

    #[error("computed and closed values disagree: {0}")]
    Mismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
