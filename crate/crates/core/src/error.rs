use thiserror::Error;

/// Errors raised by every computation in the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A required named input is missing or malformed.
    #[error("argument error: {0}")]
    Argument(String),

    /// Parameters are outside the validity range of the Coulomb fluid model.
    #[error("model domain error: {0}")]
    ModelDomain(String),

    /// Requested a term beyond what the implementation tabulates.
    #[error("capability error: {0}")]
    Capability(String),

    /// The working precision is too small for the requested computation.
    #[error("precision insufficient for {what} (suggest at least {suggested_bits} mantissa bits)")]
    PrecisionInsufficient { what: String, suggested_bits: u32 },

    /// An iterative procedure ran out of budget.
    #[error("{what} did not converge: best estimate {best:e}, error bound {error_bound:e}")]
    Convergence {
        what: String,
        best: f64,
        error_bound: f64,
    },

    /// Two routes that must agree did not.
    #[error("consistency error: {0}")]
    Consistency(String),

    /// Evaluation too close to a pole of a formula.
    #[error("singularity: {0}")]
    Singularity(String),

    /// ODE transport failed (branch ambiguity or step underflow).
    #[error("transport error: {0}")]
    Transport(String),

    /// The adaptive integrator's step fell below the representable minimum.
    #[error("stiffness: {0}")]
    Stiffness(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::Argument(_)
            | Error::ModelDomain(_)
            | Error::Capability(_)
            | Error::Singularity(_) => 2,
            Error::PrecisionInsufficient { .. }
            | Error::Convergence { .. }
            | Error::Consistency(_)
            | Error::Transport(_)
            | Error::Stiffness(_) => 3,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precision(what: impl Into<String>, suggested_bits: u32) -> Self {
        Error::PrecisionInsufficient {
            what: what.into(),
            suggested_bits,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
