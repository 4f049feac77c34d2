//! Error taxonomy shared by every module.
//!
//! Three failure classes matter to callers and map onto distinct CLI exit
//! codes: domain violations (bad input, exit 2), numerics failures
//! (tolerance not met, non-convergence, exit 3), and I/O. Everything carries
//! enough state to diagnose the run without re-executing it.

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain: {0}")]
    Domain(String),

    /// A quadrature or root-find could not meet the requested tolerance.
    #[error("numerics: {context} (achieved {achieved:.3e}, required {required:.3e})")]
    Numerics {
        context: String,
        achieved: f64,
        required: f64,
    },

    /// Newton iteration stalled; the residual history is in solve order.
    #[error("solver did not converge after {} iterations (last residual {:.3e})",
            history.len(), history.last().copied().unwrap_or(f64::NAN))]
    NonConvergence { history: Vec<f64> },

    /// The linearization has (near-)vanishing singular values and the caller
    /// did not opt into a damped solve. Values are the smallest ones found.
    #[error("singular linearization: smallest singular values {values:?}")]
    SingularLinearization { values: Vec<f64> },

    /// A refinement study ended ambiguous: neither "converges to zero" nor
    /// "stabilizes away from zero" could be certified. The eigenvalue trace
    /// is ordered coarse to fine.
    #[error("indeterminate: {context}; refinement trace {trace:?}")]
    Indeterminate { context: String, trace: Vec<f64> },

    /// A witness search exhausted its configured caps without success.
    #[error("no witness found: {0}")]
    NoWitness(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerical process rather than of the input.
    #[must_use]
    pub fn is_numerics(&self) -> bool {
        matches!(
            self,
            Error::Numerics { .. }
                | Error::NonConvergence { .. }
                | Error::SingularLinearization { .. }
                | Error::Indeterminate { .. }
                | Error::NoWitness(_)
        )
    }
}
