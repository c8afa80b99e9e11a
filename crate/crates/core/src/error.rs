use crate::exactmath::MathError;

pub type Result<T, E = GptError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GptError {
    #[error(transparent)]
    Math(#[from] MathError),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },
    #[error("{0} must not be empty")]
    Empty(&'static str),
    #[error("index {index} out of range ({len} available)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("vector is not in the state cone")]
    NotAState,
    #[error("state norm {0} is outside (0, 1]")]
    BadNorm(String),
    #[error("effect {index} is invalid: {reason}")]
    InvalidEffect { index: usize, reason: String },
    #[error("effects sum to {found}, not the unit effect")]
    NotNormalized { found: String },
    #[error("branch {0} is not a positive map")]
    NotPositive(usize),
    #[error("branches do not sum to a deterministic channel")]
    NotDeterministic,
    #[error("invalid partition: {0}")]
    BadPartition(String),
    #[error("invalid recipe {recipe:?}: {reason}")]
    BadRecipe { recipe: String, reason: String },
    #[error("composite dimension {dim} exceeds the limit {limit}")]
    DimensionLimit { dim: usize, limit: usize },
    #[error("system is not unrestricted (no-restriction hypothesis fails)")]
    Restricted,
    #[error("no supporting functional vanishes on state {0}; it is not extremal")]
    NoSupportingFunctional(usize),
    #[error("states are not distinguishable: {0}")]
    NotDistinguishable(String),
    #[error("classical set is not maximal")]
    NotMaximal,
    #[error("vector is not in the effect cone")]
    NotInEffectCone,
    #[error("axiom check failed: {0}")]
    AxiomFailure(String),
    #[error("probabilities invalid: {0}")]
    BadProbabilities(String),
    #[error("referee is not the measure-and-prepare test of a maximal classical set: {0}")]
    RefereeForm(String),
    #[error("test is not sharply repeatable")]
    NotSharplyRepeatable,
    #[error("shape mismatch: {0}")]
    Shape(String),
}
