use thiserror::Error;

/// Errors raised by the finite-system model, the relation engine and the
/// observable algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed rational `{0}` (expected \"p/q\" or \"p\")")]
    MalformedRational(String),
    #[error("metric violation: {0}")]
    MetricViolation(String),
    #[error("map is not a bijection: {0}")]
    NotABijection(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("space has fewer than two points")]
    DegenerateSpace,
    #[error("observable domain does not match the system: {0}")]
    DomainMismatch(String),
    #[error("sequence does not stabilize: {0}")]
    NonConvergent(String),
    #[error("not a conjugacy: {0}")]
    NotAConjugacy(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed document: {0}")]
    Malformed(String),
}

impl From<serde_json::Error> for ModelError {
    fn from(err: serde_json::Error) -> Self {
        ModelError::Malformed(err.to_string())
    }
}

/// Errors raised by the shift-space engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShiftError {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("no asymptotic pair found within description size {0}")]
    NoPairFound(usize),
    #[error("invalid cylinder observable: {0}")]
    InvalidObservable(String),
    #[error("malformed document: {0}")]
    Malformed(String),
}

impl From<serde_json::Error> for ShiftError {
    fn from(err: serde_json::Error) -> Self {
        ShiftError::Malformed(err.to_string())
    }
}

/// Errors raised by the circle and interval analysis.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircleError {
    #[error("invalid piecewise-linear map: {0}")]
    InvalidMap(String),
    #[error("no periodic orbit of period <= {0}")]
    NoPeriodicOrbit(u32),
    #[error("no solution of F^q(x) = x + p for p/q = {0}")]
    InconsistentRotationNumber(String),
    #[error("iterates of the probe interval overlap: {0}")]
    NotWandering(String),
    #[error("map has no wandering interval (rigid-rotation-like)")]
    NoWanderingInterval,
    #[error("horizon exceeded after {0} iterations")]
    HorizonExceeded(u64),
    #[error("map is not a rigid rotation")]
    NotRigid,
    #[error("every point is fixed{}", if *.0 == 2 { " by the square of the map" } else { "" })]
    AllFixed(u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("malformed document: {0}")]
    Malformed(String),
}

impl From<serde_json::Error> for CircleError {
    fn from(err: serde_json::Error) -> Self {
        CircleError::Malformed(err.to_string())
    }
}
