use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Validation failures that are meant to be *reported* (residuals that
/// exceed a tolerance) do not go through this type; they become entries in a
/// [`VerificationReport`](crate::report::VerificationReport).
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    MalformedDocument(String),

    #[error("not a group: {axiom} fails ({witness})")]
    NotAGroup {
        axiom: &'static str,
        witness: String,
    },

    #[error("Heisenberg group needs an odd modulus, got {0}")]
    EvenModulus(usize),

    #[error("element index {index} out of range for a group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("invalid irrep table: {0}")]
    InvalidTable(String),

    #[error(
        "irrep table is incomplete: sum of squared dimensions is {sum}, group order is {order}"
    )]
    IncompleteIrrepTable { sum: usize, order: usize },

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("unknown factor label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate factor label `{0}`")]
    DuplicateLabel(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("commutant of an empty generator set")]
    EmptyGenerators,

    #[error("total dimension {dim} exceeds the configured budget {budget}")]
    DimBudgetExceeded { dim: usize, budget: usize },

    #[error("validation failure: {0}")]
    ValidationFailure(String),

    #[error("not a density matrix: {0}")]
    NotAState(String),

    #[error("operator is not left-invariant (distance to the right-regular span {0:.3e})")]
    NotLeftInvariant(f64),

    #[error("amplitudes are not normalised (norm squared {0})")]
    NotNormalized(f64),

    #[error("unknown demo `{0}`")]
    UnknownDemo(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
