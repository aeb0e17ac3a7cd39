use thiserror::Error;

/// Errors raised by the spin-dynamics core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A system or schedule description violates one of its invariants.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    /// Step doubling did not reach the requested tolerance within the step cap.
    #[error(
        "propagation did not converge to tol {tol:e}: {substeps} substeps per output \
         interval still changed observables by {last_change:e} (previous {previous_change:e})"
    )]
    Convergence {
        tol: f64,
        substeps: usize,
        last_change: f64,
        previous_change: f64,
        /// Final observables of the last two iterates (coarse, fine).
        last_iterates: Box<(Vec<f64>, Vec<f64>)>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Error {
    Error::Invalid {
        what,
        reason: reason.into(),
    }
}
