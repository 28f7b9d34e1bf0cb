use thiserror::Error;

/// Malformed input in one of the wire formats.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad field specification `{0}` (expected `q` or `gf:<prime>`)")]
    BadField(String),
    #[error("bad scalar `{0}`")]
    BadScalar(String),
    #[error("bad index `{0}` (expected a positive integer or `inf`)")]
    BadIndex(String),
    #[error("json: {0}")]
    Json(String),
    #[error("{0}")]
    Invalid(String),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e.to_string())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("mixed fields: {0} vs {1}")]
    MixedFields(String, String),
    #[error("d∘d ≠ 0 at degree {degree}")]
    NotAComplex { degree: i32 },
    #[error("not a chain map at degree {degree}")]
    NotAChainMap { degree: i32 },
    #[error("expected a complex of free modules")]
    NotFree,
    #[error("object is not perfect (contains X_inf)")]
    NotPerfect,
    #[error("no generator {0}")]
    NoSuchGenerator(String),
    #[error("truncation length {n} below the stabilization bound {bound}")]
    TruncationTooShort { n: usize, bound: usize },
    #[error("morphism objects do not match: {0}")]
    ObjectMismatch(String),
    #[error("coefficient assignment is not functorial: {0}")]
    NotFunctorial(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Format(#[from] FormatError),
}

pub type Result<T> = std::result::Result<T, Error>;
