use thiserror::Error;

/// Errors raised by the special-function kernel, the model and the metrics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("{func}: argument outside domain ({detail})")]
    Domain { func: &'static str, detail: String },

    /// The function has a pole at the requested point.
    #[error("{func}: pole at x = {at}")]
    Pole { func: &'static str, at: f64 },

    /// An infinite series did not meet its stopping rule within the term budget.
    #[error("{func}: series not converged after {terms} terms")]
    Truncation { func: &'static str, terms: usize },

    /// A transform or integral diverges at the requested argument.
    #[error("{func}: diverges ({detail})")]
    Divergence { func: &'static str, detail: String },

    /// A model or scenario parameter violates its invariant.
    #[error("invalid parameter {name} = {value}: must satisfy {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// Malformed call (empty input, inconsistent sizes, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A computed quantity broke a property the mathematics guarantees.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Pole { .. }
                | Error::Truncation { .. }
                | Error::Divergence { .. }
                | Error::Consistency(_)
        )
    }

    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
