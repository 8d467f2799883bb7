use thiserror::Error;

/// Errors raised by the simulation library.
///
/// Every variant is a hard error: they signal invalid input or a broken
/// invariant, never a recoverable runtime condition.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("factor dimensions {dims:?} do not multiply to {len}")]
    FactorDims { dims: Vec<usize>, len: usize },

    #[error("tensor slot {slot} out of range for {factors} factors")]
    SlotOutOfRange { slot: usize, factors: usize },

    #[error("tensor slot {0} used more than once")]
    SlotCollision(usize),

    #[error("operator is not {kind}: deviation {deviation:e}")]
    KindViolation { kind: &'static str, deviation: f64 },

    #[error("invalid projector family: {0}")]
    InvalidProjectors(String),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("outcome has zero probability: {0}")]
    ZeroProbability(String),

    #[error("outcome sum {0} outside [-2, 2]")]
    OutcomeSumOutOfRange(i32),

    #[error("unreachable classification: {0}")]
    Unclassifiable(String),

    #[error("reduction operators {i} and {j} do not commute: commutator norm {norm:e}")]
    NonCommuting { i: usize, j: usize, norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("surface is not space-like: segment slope {slope}")]
    NotSpacelike { slope: f64 },

    #[error("point ({x}, {t}) lies below the initial surface")]
    BelowInitialSurface { x: f64, t: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("malformed counterfactual claim: {0}")]
    MalformedClaim(String),

    #[error("hidden-variable model rejected: {0}")]
    LocalModel(String),

    #[error("state is not a product of a probe basis state and a system state: {0}")]
    NotProductState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
