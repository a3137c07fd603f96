use thiserror::Error;

/// Errors raised by the numerical routines and market models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value encountered at x = {at}")]
    Domain { at: f64 },

    #[error("quadrature tolerance not reached (estimate {estimate}, error bound {error_bound})")]
    Accuracy { estimate: f64, error_bound: f64 },

    #[error("value {value} is not attainable; it lies between the attainable values {lo} and {hi}")]
    Range { value: f64, lo: f64, hi: f64 },

    #[error("signal x = {x} has vanishing marginal density")]
    UndefinedSignal { x: f64 },

    #[error("worker objective is locally flat at y' = {at} (second-order coefficient {coefficient:e})")]
    DegenerateResponse { at: f64, coefficient: f64 },

    #[error("gradient estimation failed: {0}")]
    Estimation(String),

    #[error("invalid configuration at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Best available estimate carried by an accuracy failure.
    pub fn best_estimate(&self) -> Option<f64> {
        match self {
            Error::Accuracy { estimate, .. } => Some(*estimate),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
