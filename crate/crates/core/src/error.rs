use thiserror::Error;

use crate::sign::Sign;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative probability {value} at cell {index}")]
    NegativeMass { index: usize, value: f64 },
    #[error("probabilities sum to {0}, expected 1")]
    MassNotOne(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("variable `{name}` has an invalid support: {reason}")]
    InvalidSupport { name: String, reason: String },
    #[error("variable `{0}` is declared more than once")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("level {level} is not in the support of `{variable}`")]
    UnknownLevel { variable: String, level: f64 },
    #[error("conditioning event has zero probability")]
    ZeroProbabilityEvidence,
    #[error("cdfs are defined on different supports")]
    SupportMismatch,

    #[error("edge {0} -> {0} is a self-loop")]
    SelfLoop(String),
    #[error("edge {from} -> {to} carries sign 0; omit the edge instead")]
    ZeroSignEdge { from: String, to: String },
    #[error("more than one edge between {from} and {to}")]
    DuplicateEdge { from: String, to: String },
    #[error("graph contains a cycle through `{0}`")]
    CycleDetected(String),
    #[error("query sets overlap on `{0}`")]
    OverlappingSets(String),

    #[error("context overlaps the influence pair on `{0}`")]
    ContextOverlap(String),
    #[error("level {level} of `{variable}` has no probability mass")]
    ZeroColumn { variable: String, level: f64 },
    #[error("{count} upper sets exceed the enumeration limit")]
    SupportTooLarge { count: u128 },
    #[error("likelihood does not satisfy the monotone likelihood ratio property")]
    NotMlrp,
    #[error("likelihood satisfies the monotone likelihood ratio property; no witness exists")]
    IsMlrp,

    #[error("`{node}` has {count} parents; reduction needs at most one")]
    TooManyParents { node: String, count: usize },
    #[error("no edge {from} -> {to}")]
    NoSuchEdge { from: String, to: String },
    #[error("reversing {from} -> {to} would create a cycle")]
    WouldCreateCycle { from: String, to: String },
    #[error("query made no progress; residual edges: {0}")]
    Stuck(String),
    #[error("evidence sign must be + or -, got {0}")]
    BadEvidenceSign(Sign),
    #[error("probability {0} is outside (0, 1)")]
    BadProbability(f64),
    #[error("invalid claim `{0}`")]
    InvalidClaim(String),
    #[error("invalid sign `{0}`")]
    InvalidSign(String),
}
