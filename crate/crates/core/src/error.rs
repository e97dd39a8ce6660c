use thiserror::Error;

/// Errors raised by the solvers and model constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AuditError {
    /// A scalar parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// A composite input (distribution, matrix, strategy) failed validation.
    #[error("validation failed: {0}")]
    Validation(String),

    /// A privacy budget was looked up that is not part of the grid.
    #[error("privacy budget {0} is not in the budget grid")]
    Lookup(f64),

    #[error("fixed point did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// The grid has no budget other than the claimed one.
    #[error("no feasible deviation from the claimed budget")]
    NoFeasibleDeviation,

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A function handed to a numerical checker returned a non-finite value.
    #[error("evaluation failed at x = {x}: {reason}")]
    Evaluation { x: f64, reason: String },
}

impl AuditError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        AuditError::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        AuditError::Validation(msg.into())
    }
}

pub type Result<T, E = AuditError> = std::result::Result<T, E>;
