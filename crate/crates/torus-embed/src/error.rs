//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {message}")]
    ExprParse { pos: usize, message: String },

    #[error("evaluation error in `{subexpr}`: {message}")]
    ExprEval { subexpr: String, message: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not a lattice-compatible isometry: {0}")]
    NotLatticeCompatible(String),

    #[error("speed budget violated: k*(r_out - r_in)/4 = {budget} >= 1")]
    SpeedBudget { budget: f64 },

    #[error("invalid spiral parameters: {0}")]
    SpiralParams(String),

    #[error("metric not positive definite (grid minimum eigenvalue {min_eig})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("metric not invariant under declared group (residual {residual} for generator {generator})")]
    NotInvariant { residual: f64, generator: String },

    #[error("not representable over candidate set; enlarge set (residual {residual})")]
    NotRepresentable { residual: f64 },

    #[error("oracle rejected: {0}")]
    OracleRejected(String),

    #[error("extension unavailable for this element: {0}")]
    ExtensionUnavailable(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
