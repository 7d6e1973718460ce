use thiserror::Error;

/// Errors raised by the state-space primitives, propagators and walk engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("degenerate state: vector has zero norm")]
    DegenerateState,

    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("packet does not fit the grid (norm deficit {deficit:.3e})")]
    GridSupport { deficit: f64 },

    #[error("walker left the grid support margin at {position:?}")]
    SupportMargin { position: Vec<f64> },

    #[error("insufficient grid resolution: {0}")]
    Resolution(String),

    #[error("projection did not converge after {iterations} iterations (best distance {distance:.6e})")]
    ProjectionFailure {
        params: Vec<f64>,
        distance: f64,
        iterations: usize,
    },

    #[error("Hermitian eigendecomposition failed")]
    Eigen,

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),

    #[error("detector set is empty")]
    EmptyDetectors,

    #[error("joint dimension {requested} exceeds budget {budget}")]
    Budget { requested: usize, budget: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param_err(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
