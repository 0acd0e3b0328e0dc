use thiserror::Error;

/// Errors surfaced by scenario validation and the solver layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("utility evaluated outside its domain: x={x} exceeds table maximum {max}")]
    DomainExceeded { x: u64, max: u64 },

    #[error("no item count reaches the requested utility {y}")]
    UnreachableValue { y: String },

    #[error("allocation is incomplete for type '{type_name}': placed {got} of {expected} items")]
    IncompleteAllocation {
        type_name: String,
        got: u64,
        expected: u64,
    },

    #[error("utility of agent {agent} is not concave; the greedy welfare solvers require concave utilities")]
    NonConcaveUtility { agent: String },

    #[error("balanced allocation requires all weights to be equal")]
    UnequalWeights,

    #[error("agent {agent} does not use a power-form utility")]
    NonPowerUtility { agent: String },

    #[error("constructed allocation failed fairness verification: {0}")]
    VerificationFailed(String),

    #[error("integer-valued data required: {0}")]
    NonIntegerData(String),

    #[error("instance exceeds solver limits: {0}")]
    LimitsExceeded(String),

    #[error("per-agent scalar weights required: weights must not vary across types")]
    ScalarWeightsRequired,
}

pub type Result<T> = std::result::Result<T, Error>;
