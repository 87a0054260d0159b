use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("no unobserved cells to score")]
    NothingUnobserved,
    #[error("truth is zero on every unobserved cell; relative error undefined")]
    ZeroDenominator,
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("eigen-solver failed: {0}")]
    EigenFailure(String),
    #[error("Newton iteration did not converge at step {step} (residual {residual:e})")]
    NewtonDivergence { step: usize, residual: f64 },
    #[error("structure collapsed at step {step}")]
    Collapse { step: usize, peak_base_shear: f64 },
    #[error("cell ({row}, {col}): {source}")]
    Cell {
        row: usize,
        col: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn dims(expected: impl Into<String>, found: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            expected: expected.into(),
            found: found.into(),
        }
    }
}
