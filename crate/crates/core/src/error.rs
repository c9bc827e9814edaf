use thiserror::Error;

use crate::exprparse::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A series or asymptotic evaluator could not meet its tolerance.
    #[error("{what} did not converge at {arg:?}: {detail}")]
    NonConvergence {
        what: &'static str,
        arg: f64,
        detail: String,
    },

    #[error("quadrature failed on [{lo:?}, {hi:?}]: estimated error {error:e} after {panels} panels")]
    QuadratureFailure {
        lo: f64,
        hi: f64,
        error: f64,
        panels: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("data growth violation: {0}")]
    GrowthViolation(String),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A failure while evaluating a field, with where it happened.
    #[error("at (x={x:?}, y={y:?}) with {completed} of {total} points done: {source}")]
    AtPoint {
        x: f64,
        y: f64,
        completed: usize,
        total: usize,
        source: Box<Error>,
    },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for configuration, domain and data problems (as opposed to
    /// numerical failure). Expression evaluation errors count as data problems.
    pub fn is_config(&self) -> bool {
        if let Error::AtPoint { source, .. } = self {
            return source.is_config();
        }
        matches!(
            self,
            Error::Domain(_)
                | Error::Config(_)
                | Error::GridMismatch(_)
                | Error::Parse(_)
                | Error::Eval(_)
                | Error::GrowthViolation(_)
        )
    }
}
