use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Row/column shape used in error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape(pub usize, pub usize);

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{op}: shape mismatch between {left} and {right}")]
    ShapeMismatch {
        op: &'static str,
        left: Shape,
        right: Shape,
    },
    #[error("{op}: expected length {expected}, got {actual}")]
    LengthMismatch {
        op: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("{0}: non-finite value")]
    NonFinite(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("weight matrix {layer}: column {column} has zero absolute sum")]
    ZeroColumn { layer: usize, column: usize },
    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{column}`: category `{category}` is not in the declared list")]
    UnseenCategory { column: String, category: String },
    #[error("class {0} has too few samples")]
    MissingClass(u8),
    #[error("recipe step {index} ({op}): {source}")]
    RecipeStep {
        index: usize,
        op: &'static str,
        source: Box<Error>,
    },
    #[error("layer {layer}: {source}")]
    Layer { layer: usize, source: Box<Error> },
    #[error("no convergence after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NoConvergence {
        iterations: usize,
        gradient_norm: f64,
    },
    #[error("perfect separation detected")]
    PerfectSeparation,
    #[error("zero residual variance or zero coefficients")]
    ZeroResidualVariance,
    #[error("{0}: matrix is singular")]
    Singular(&'static str),
    #[error("actual value is zero at indices {0:?}")]
    ZeroActual(Vec<usize>),
    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Whether the failure comes from the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonFinite(_)
            | Error::ZeroColumn { .. }
            | Error::NoConvergence { .. }
            | Error::PerfectSeparation
            | Error::ZeroResidualVariance
            | Error::Singular(_) => true,
            Error::RecipeStep { source, .. } | Error::Layer { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
