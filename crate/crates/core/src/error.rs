use thiserror::Error;

/// Errors raised by the toolkit. Verdict-level outcomes such as
/// "inconclusive" are not errors; they live in the reports.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix must be square with dimension >= 1, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unimodular (determinant {det})")]
    NotUnimodular { det: String },

    #[error("generator {index} is not unimodular (determinant {det})")]
    GeneratorNotUnimodular { index: usize, det: String },

    #[error("generators {first} and {second} do not commute")]
    NotCommuting { first: usize, second: usize },

    #[error("polynomial must have degree >= 1")]
    ConstantPolynomial,

    #[error("polynomial is not monic")]
    NotMonic,

    #[error("factorization exceeds desk-scale limits: {0}")]
    DeskScaleExceeded(String),

    #[error("matrix is not unipotent")]
    NotUnipotent,

    #[error("matrix is not upper triangular with unit diagonal")]
    NotUpperUnitriangular,

    #[error("no generator with simple spectrum; common eigenvectors unsupported")]
    NoSimpleSpectrum,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("polynomial is reducible over Z")]
    ReduciblePolynomial,

    #[error("polynomial is not totally real; unit rank is {unit_rank}, construction needs 2")]
    NotTotallyReal { unit_rank: usize },

    #[error("no multiplicatively independent unit pair with coordinates bounded by {bound}; try a larger bound")]
    NoIndependentUnits { bound: u32 },

    #[error("expected a cubic, got degree {0}")]
    NotCubic(usize),

    #[error("orbit exceeds cap {cap}; raise the cap (the orbit is still finite)")]
    OrbitCapExceeded { cap: usize },

    #[error("invalid torus point: {0}")]
    InvalidPoint(String),

    #[error("sequence is not lacunary with ratio {ratio} at index {index}")]
    NotLacunary { ratio: String, index: usize },

    #[error("sequence term {index} is not positive")]
    NonPositiveTerm { index: usize },

    #[error("badly approximable search exhausted below epsilon floor {floor}")]
    SearchExhausted { floor: String },

    #[error("no non-real eigenvalue with modulus > 1; use the real-eigenvalue path")]
    NoComplexExpandingEigenvalue,

    #[error("no eigenvector normalization with non-real second coordinate exists")]
    DegenerateEigenvector,

    #[error("no eigenvalue with modulus > 1")]
    NoExpandingEigenvalue,

    #[error("empty polynomial family")]
    EmptyFamily,

    #[error("polynomial has a nonzero constant term")]
    ConstantTerm,

    #[error("invalid input at {field}: {message}")]
    Schema { field: String, message: String },

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}
