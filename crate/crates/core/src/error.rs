use std::fmt;

use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why a node could not reconstruct one of its intermediate values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// A side-information value needed to cancel interference was not in the
    /// receiver's Map store.
    MissingSideInformation,
    /// A required value never reached the node.
    Missing,
    /// A value reached the node but differs from the ground truth.
    Corrupted,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureKind::MissingSideInformation => "missing side information",
            FailureKind::Missing => "missing",
            FailureKind::Corrupted => "corrupted",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("computation profile is empty")]
    EmptyProfile,

    #[error("computation load of node {} is {value}; it must lie strictly between 0 and 1", .index + 1)]
    LoadOutOfRange { index: usize, value: Rational },

    #[error("computation loads sum to {total}, need at least 1")]
    InsufficientTotal { total: Rational },

    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("function fraction of node {} is {value}; it must not be negative", .index + 1)]
    NegativeFraction { index: usize, value: Rational },

    #[error("function fractions sum to {total}, must be exactly 1")]
    SumNotOne { total: Rational },

    #[error("shuffle-aware assignment needs total computation load above 1")]
    RequiresRedundancy,

    #[error("out of domain: {0}")]
    OutOfDomain(String),

    #[error("{k} nodes exceeds the limit of {cap}")]
    TooManyNodes { k: usize, cap: usize },

    #[error("minimal file count {symbolic} exceeds the cap {cap}")]
    OverflowGuard { symbolic: String, cap: u64 },

    #[error("{what} = {given} is not a multiple of {minimal}")]
    IndivisibleInstance {
        what: &'static str,
        given: u64,
        minimal: String,
    },

    #[error("instance would hold {ivs} intermediate values, above the limit of {cap}")]
    InstanceTooLarge { ivs: String, cap: u64 },

    #[error("node {node} failed to decode v[q={q}, n={n}]: {kind}")]
    DecodeFailure {
        node: usize,
        q: usize,
        n: usize,
        kind: FailureKind,
    },
}
