use thiserror::Error;

/// Errors produced anywhere in the distance pipeline.
///
/// Variants fall into four classes (see [`ErrorClass`]) which the CLI maps
/// onto exit codes.
#[derive(Debug, Error)]
pub enum GgdError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite (Cholesky failed)")]
    NotPositiveDefinite,

    #[error("eigensolver did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("pair ({i}, {j}): {source}")]
    Pair {
        i: usize,
        j: usize,
        #[source]
        source: Box<GgdError>,
    },
}

/// Coarse error taxonomy used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Parse,
    Numerical,
    Infeasible,
}

impl GgdError {
    pub fn class(&self) -> ErrorClass {
        match self {
            GgdError::InvalidArgument(_) => ErrorClass::Usage,
            GgdError::InvalidGraph(_) | GgdError::Parse { .. } | GgdError::Io { .. } => {
                ErrorClass::Parse
            }
            GgdError::NotSymmetric(_)
            | GgdError::NotPositiveDefinite
            | GgdError::NoConvergence(_) => ErrorClass::Numerical,
            GgdError::DimensionMismatch { .. }
            | GgdError::Disconnected { .. }
            | GgdError::Infeasible(_) => ErrorClass::Infeasible,
            GgdError::Pair { source, .. } => source.class(),
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        GgdError::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = GgdError> = std::result::Result<T, E>;
