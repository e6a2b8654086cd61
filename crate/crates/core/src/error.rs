use thiserror::Error;

/// Errors raised while building or operating on shifts and hull elements.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HullError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("operation undefined on the zero element")]
    ZeroElement,

    #[error("oracle depth {depth} too small: {reason}")]
    Depth { depth: usize, reason: String },

    #[error("power iteration did not converge after {iterations} iterations (bounds [{lower}, {upper}])")]
    NoConvergence {
        iterations: usize,
        lower: f64,
        upper: f64,
    },

    #[error("axioms not satisfied: {0} failed")]
    AxiomFailure(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T, E = HullError> = std::result::Result<T, E>;
