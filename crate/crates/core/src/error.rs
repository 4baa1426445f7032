use thiserror::Error;

use crate::scheme::SchemeViolation;

/// Errors produced by scheme construction, tallying, theory evaluation and
/// data generation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid bin scheme: {}", join_violations(.0))]
    InvalidScheme(Vec<SchemeViolation>),

    #[error("cycle {cycle} is beyond the last cycle ({last}) of a vector scheme")]
    CycleOutOfRange { cycle: u64, last: u64 },

    #[error("value {0} is not a positive finite number")]
    NonPositiveValue(f64),

    #[error("value {0} lies in a cycle too far out to resolve bins in double precision")]
    Unresolvable(f64),

    #[error("no in-range values to aggregate")]
    EmptyData,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("not a proportion vector: {0}")]
    InvalidProportions(String),

    #[error("tallies were built under different schemes")]
    SchemeMismatch,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

fn join_violations(v: &[SchemeViolation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
