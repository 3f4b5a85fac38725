use thiserror::Error;

/// Errors raised while building models or evaluating their functionals.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid phase-type representation: {0}")]
    InvalidPhaseType(String),

    #[error("drift c_Y = {c_y} must be positive when sigma = 0 (the surplus would be a subordinator)")]
    SubordinatorPath { c_y: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Laplace exponent has a pole near theta = {theta}")]
    PoleAtTheta { theta: f64 },

    #[error("could not bracket the root of psi(theta) = {q}")]
    NoBracket { q: f64 },

    #[error("roots {first} and {second} of psi(s) = q are not distinct; perturb q slightly")]
    NonDistinctRoots { first: String, second: String },

    #[error("expected {expected} roots with negative real part, found {found}")]
    WrongRootCount { expected: usize, found: usize },

    #[error("argument {value} outside the admissible range: {reason}")]
    OutOfRange { value: f64, reason: String },

    #[error("initial surplus must be nonnegative, got {0}")]
    NegativeStart(f64),

    #[error("invalid strategy (a = {a}, b = {b}): need 0 <= a < b or a = b = 0")]
    InvalidStrategy { a: f64, b: f64 },

    #[error("benchmark not applicable: {0}")]
    NotApplicable(String),

    #[error("bracket [{lo}, {hi}] does not enclose a sign change of the boundary function")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
