use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("tree would have {requested} vertices, limit is {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("invalid tree shape: {0}")]
    InvalidShape(String),

    #[error("malformed vertex id {0}")]
    MalformedId(usize),

    #[error("vertex {child} has parent {parent}, parents must precede children")]
    ForwardParent { child: usize, parent: usize },

    #[error("vertex {vertex} at depth {depth} has no children but the tree depth is {max_depth}")]
    InteriorLeaf {
        vertex: usize,
        depth: usize,
        max_depth: usize,
    },

    #[error("vertex {0} is not in the tree")]
    UnknownVertex(usize),

    #[error("vertex {vertex} has depth {depth}, expected {expected}")]
    WrongDepth {
        vertex: usize,
        depth: usize,
        expected: usize,
    },

    #[error("depth {requested} exceeds truncation depth {max_depth}")]
    DepthOverflow { requested: usize, max_depth: usize },

    #[error("vertices {0} and {1} are not adjacent")]
    NotAnEdge(usize, usize),

    #[error("not a chain pointing away from the root: {0}")]
    InvalidChain(String),

    #[error("no mass given for leaf {0}")]
    MissingLeaf(usize),

    #[error("duplicate entry for vertex {0}")]
    Duplicate(usize),

    #[error("objects belong to different trees")]
    TreeMismatch,

    #[error("the tree is not regular")]
    NonRegular,

    #[error("spectral parameter must be nonzero")]
    ZeroParameter,

    #[error("spectral parameter z = {0} is forbidden here (z^2 must avoid 0 and 1)")]
    ForbiddenParameter(Complex64),

    #[error("parameter outside the admissible regime: {0}")]
    ParameterRegime(String),

    #[error("powers of |z| = {modulus} up to depth {depth} leave the double range")]
    Overflow { modulus: f64, depth: usize },

    #[error("theta must lie in (0, 1), got {0}")]
    InvalidTheta(f64),

    #[error("edge flow violates the compatibility law by {0:e}")]
    Incompatible(f64),

    #[error("function is not an eigenfunction: compatibility gap {compat:e}, root gap {root:e}")]
    NotAnEigenfunction { compat: f64, root: f64 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input data, structure or arguments.
    Domain,
    /// Parameter outside the numerically admissible regime.
    Numeric,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::ZeroParameter
            | Error::ForbiddenParameter(_)
            | Error::ParameterRegime(_)
            | Error::Overflow { .. }
            | Error::InvalidTheta(_) => ErrorClass::Numeric,
            Error::Io(_) => ErrorClass::Io,
            _ => ErrorClass::Domain,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
