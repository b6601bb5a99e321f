use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rewriting exceeded the step budget of {budget} while normalizing `{word}`")]
    RewriteBudget { word: String, budget: usize },

    #[error("elements live in different algebras: `{left}` and `{right}`")]
    PresentationMismatch { left: String, right: String },

    #[error("invalid presentation `{name}`: {reason}")]
    InvalidPresentation { name: String, reason: String },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("morphism `{name}` is not well defined: relation `{relation}` maps to {lhs} != {rhs}")]
    IllDefinedMorphism {
        name: String,
        relation: String,
        lhs: String,
        rhs: String,
    },

    #[error("morphism `{0}` has no well-definedness certificate")]
    UncertifiedMorphism(String),

    #[error("`{0}` has no inverse antipode")]
    MissingAntipodeInverse(String),

    #[error("incompatible linear maps: {0}")]
    IncompatibleMaps(String),

    #[error("convolution power must be at least 1, got {0}")]
    InvalidPower(i64),

    #[error("gluing violated on overlap {overlap}: {lhs} != {rhs}")]
    Gluing {
        overlap: String,
        lhs: String,
        rhs: String,
    },

    #[error("invalid base element: {0}")]
    InvalidBaseElement(String),

    #[error("compatibility identity fails on `{monomial}` over overlap {overlap}: {lhs} != {rhs}")]
    Compatibility {
        overlap: String,
        monomial: String,
        lhs: String,
        rhs: String,
    },

    #[error("gauge transformations act from different sides")]
    SideMismatch,

    #[error("transition data rejected: {0}")]
    Transition(String),

    #[error("matrix not invertible at degree bound {degree}: row {row}")]
    NotInvertible { degree: usize, row: usize },

    #[error("matrix inverse undetermined at degree bound {degree}: solvable only over the field of fractions")]
    InverseUndetermined { degree: usize },

    #[error("unknown standard Hopf algebra `{0}`")]
    UnknownHopf(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
