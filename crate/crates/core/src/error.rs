//! Crate-wide error type.

use thiserror::Error;

use crate::arith::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot factorize 0")]
    FactorizeZero,

    #[error("basket budget exhausted: sum of (r - 1/r) is {sum}, not below 24")]
    NonFanoBudget { sum: Rational },

    #[error("invalid basket entry ({r},{b}): {reason}")]
    InvalidBasketEntry { r: u64, b: u64, reason: &'static str },

    #[error("index multiset entries must be at least 2, got {0}")]
    InvalidIndexValue(u64),

    #[error("epsilon must lie in (0,1], got {0}")]
    InvalidEpsilon(Rational),

    #[error("the refined budget requires q >= 6, got q={0}")]
    BudgetRequiresLargeQ(u64),

    #[error("no finite bound from this profile: deficit {deficit} reaches 2q^2 with q={q}")]
    UnboundedProfile { deficit: Rational, q: u64 },

    #[error("invalid Harder-Narasimhan profile: {0}")]
    InvalidProfile(String),

    #[error("singularity class parameter out of range: {0}")]
    InvalidSingularityClass(String),

    #[error("weights are not well-formed: {0}")]
    MalformedWeights(String),

    #[error("invalid scaled degree: {0}")]
    InvalidDegree(String),

    #[error("cannot parse `{input}` as {what}")]
    Parse { input: String, what: &'static str },
}
