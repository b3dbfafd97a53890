use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed graph document: {0}")]
    Malformed(String),
    #[error("duplicate identifier `{0}`")]
    DuplicateIdentifier(String),
    #[error("edge `{edge}` names unknown endpoint `{endpoint}`")]
    DanglingEndpoint { edge: String, endpoint: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("graph has {vertices} vertices; brute-force bound is {bound}")]
    SizeBoundExceeded { vertices: usize, bound: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: usize, right: usize },
    #[error("no KMS state: {0}")]
    NoKmsState(String),
    #[error("gauge parameter must have modulus 1, got {0}")]
    NotUnimodular(f64),
    #[error("multigraph input: {0} parallel edges between one ordered vertex pair")]
    Multigraph(usize),
    #[error("hypothesis: {0}")]
    Hypothesis(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Stable machine-readable code used in CLI error documents.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Malformed(_) => "malformed",
            Error::DuplicateIdentifier(_) => "duplicate_identifier",
            Error::DanglingEndpoint { .. } => "dangling_endpoint",
            Error::UnknownIdentifier(_) => "unknown_identifier",
            Error::SizeBoundExceeded { .. } => "size_bound_exceeded",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::LevelMismatch { .. } => "level_mismatch",
            Error::NoKmsState(_) => "no_kms_state",
            Error::NotUnimodular(_) => "not_unimodular",
            Error::Multigraph(_) => "multigraph",
            Error::Hypothesis(_) => "hypothesis",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::Invalid(_) => "invalid",
        }
    }

    /// The offending token, when there is one.
    pub fn location(&self) -> Option<String> {
        match self {
            Error::DuplicateIdentifier(id) | Error::UnknownIdentifier(id) => Some(id.clone()),
            Error::DanglingEndpoint { edge, endpoint } => Some(format!("{edge}:{endpoint}")),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
