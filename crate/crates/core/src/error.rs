use thiserror::Error;

/// Errors surfaced by the toolkit.
///
/// `InvalidParameter` carries the violated constraint verbatim so a CLI can
/// quote it back to the user. `Numerical` covers factorization and quadrature
/// failures that depend on runtime values rather than inputs alone.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A precondition on the inputs does not hold.
    #[error("invalid parameter: {constraint}")]
    InvalidParameter { constraint: String },

    /// Two paths that must be step-aligned have different lengths.
    #[error("length mismatch: left has {left} states, right has {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNoConverge { achieved: f64, requested: f64 },

    /// The covariance factorization failed even after diagonal jitter.
    #[error("covariance factorization failed (jitter tried: {jitter_tried:.3e})")]
    FactorizationFailed { jitter_tried: f64 },

    /// A block variance or normalizing constant came out non-positive,
    /// which signals an invalid kernel or grid ratio.
    #[error("non-positive {what} = {value:.6e}: invalid kernel or grid parameter")]
    NonPositive { what: &'static str, value: f64 },
}

/// Shorthand for [`Error::InvalidParameter`].
pub(crate) fn invalid(constraint: impl Into<String>) -> Error {
    Error::InvalidParameter {
        constraint: constraint.into(),
    }
}

impl Error {

    /// True for errors that indicate bad inputs rather than numerical failure.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::LengthMismatch { .. }
        )
    }
}
