use thiserror::Error;

/// Errors raised by the kneading, orbit, solver and diagnostic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KneadError {
    #[error("kneading rule violated at k = {k}: {reason}")]
    RuleViolation { k: usize, reason: String },

    #[error("index {index} is outside the generated range (limit {limit})")]
    OutOfRange { index: u64, limit: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precision exhausted at {bits} bits: {context}")]
    PrecisionExhausted { bits: u32, context: String },

    #[error("orbit escaped at step {step}")]
    Escaped { step: u64 },

    #[error("critical point hit on the orbit at step {step}")]
    CriticalPointOnOrbit { step: u64 },

    #[error("no sign change for bisection: {0}")]
    NoBracket(String),

    #[error("no root of f^{period} on the central branch at level {k}")]
    NoRoot { k: usize, period: u64 },

    #[error("target kneading prefix is unreachable; first mismatch at index {index}")]
    AdmissibilityViolation { index: u64 },

    #[error("itinerary order is not monotone in the parameter: {0}")]
    MonotonicityViolation(String),

    #[error("undecided symbol at index {index}")]
    UndecidedSymbol { index: usize },

    #[error("closest-return law violated at k = {k}: {detail}")]
    ClosestReturnViolated { k: usize, detail: String },

    #[error("containment unresolved for n = {n}: {detail}")]
    UnresolvedContainment { n: u64, detail: String },

    #[error("ladder too short: need level {needed}, have {have}")]
    LadderTooShort { needed: usize, have: usize },

    #[error("critical collision along preimage path {path}")]
    CriticalCollision { path: String },

    #[error("base point lies on the postcritical orbit (f^{step}(0))")]
    PostcriticalBasePoint { step: u64 },

    #[error("endpoint of the monotone neighbourhood unresolved: {0}")]
    EndpointUnresolved(String),
}

pub type Result<T> = std::result::Result<T, KneadError>;
