use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A field does not conform to the mesh it is used with.
    #[error("dimension mismatch: field has {found} values, mesh expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    /// An argument violates an operation's precondition.
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    /// A Young function description is malformed.
    #[error("invalid Young function: {0}")]
    InvalidYoung(String),

    /// A mesh description is malformed.
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    /// The field is identically zero where a nonzero field is required.
    #[error("field is identically zero")]
    ZeroField,

    /// A denominator underflowed to zero.
    #[error("degenerate quotient: {0}")]
    DegenerateQuotient(&'static str),

    /// A root bracket could not be established before the arithmetic overflowed.
    #[error("normalization out of range: could not bracket root in [{lo:e}, {hi:e}]")]
    Range { lo: f64, hi: f64 },

    /// A value overflowed the representable range.
    #[error("overflow while evaluating {0}")]
    Overflow(&'static str),

    /// The geometry does not admit the requested construction.
    #[error("geometry: {0}")]
    Geometry(String),

    /// A hypothesis of a verification check is not met.
    #[error("precondition not met: {0}")]
    Precondition(String),

    /// A linear system was not positive definite.
    #[error("preconditioner is not positive definite")]
    NotPositiveDefinite,

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
