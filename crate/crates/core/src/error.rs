use thiserror::Error;

/// Broad failure classes; the CLI maps each to an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Input,
    Precondition,
    Budget,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed rule document: {0}")]
    Schema(String),
    #[error("undeclared label {label:?} in the image of {image_of:?}")]
    UndeclaredLabel { label: String, image_of: String },
    #[error("ragged image array for {0:?}")]
    RaggedImage(String),
    #[error("non-positive side length for {0:?}")]
    NonPositiveDimension(String),
    #[error("duplicate prototile label {0:?}")]
    DuplicateLabel(String),
    #[error("substitution is not primitive: {0}")]
    NotPrimitive(String),
    #[error("legal patches did not stabilise within {0} inflations")]
    NotStabilised(usize),
    #[error("collared substitution is not well defined: {0}")]
    WellDefinedness(String),
    #[error("flattening condition fails: {0}")]
    Flattening(String),
    #[error("cell budget exceeded: {needed} cells requested, budget {budget}")]
    Budget { needed: u128, budget: u64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("translation crosses a branch locus not resolved at truncation depth {depth}")]
    Ambiguity { depth: usize },
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("algebra: {0}")]
    Algebra(String),
    #[error("expression: {0}")]
    Expression(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::NotPrimitive(_)
            | Error::NotStabilised(_)
            | Error::WellDefinedness(_)
            | Error::Flattening(_)
            | Error::Ambiguity { .. }
            | Error::Algebra(_) => Category::Precondition,
            Error::Budget { .. } => Category::Budget,
            _ => Category::Input,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
