use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty span")]
    EmptySpan,
    #[error("zero subspace")]
    ZeroSubspace,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite entry")]
    NonFinite,
    #[error("asymmetric input (max deviation {0:e})")]
    Asymmetric(f64),
    #[error("singular matrix")]
    Singular,
    #[error("empty complement")]
    EmptyComplement,
    #[error("Phi undefined; use zero map")]
    BoundaryAngle,
    #[error("wrong dimensions: {0}")]
    WrongDimensions(String),
    #[error("non-associative input (residual {0:e})")]
    NotAssociative(f64),
    #[error("immersion singular")]
    ImmersionSingular,
    #[error("parameter outside domain: {0}")]
    OutsideDomain(String),
    #[error("v infinite")]
    VInfinite,
    #[error("kappa undefined")]
    KappaUndefined,
    #[error("no frame field")]
    NoFrameField,
    #[error("not coassociative here")]
    NotCoassociative,
    #[error("vector not in the angle space (off-component {0:e})")]
    NotInAngleSpace(f64),
    #[error("identity not applicable: {0}")]
    Inapplicable(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown model: {0}")]
    UnknownModel(String),
    #[error("cone vertex")]
    ConeVertex,
}

pub type Result<T> = std::result::Result<T, Error>;
