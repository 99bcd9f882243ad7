use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("structure constants are not associative on basis triple ({0}, {1}, {2})")]
    NonAssociative(usize, usize, usize),
    #[error("unit does not act as identity on basis element {0}")]
    UnitFailure(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("modules are over different algebras")]
    AlgebraMismatch,
    #[error("algebras are over different prime fields")]
    FieldMismatch,
    #[error("map is not a morphism: {0}")]
    NotAMorphism(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("splitting data violates the split exact sequence identities: {0}")]
    SplittingInvalid(String),
    #[error("input complex is unbounded")]
    UnboundedInput,
    #[error("input sequence is not exact: {0}")]
    InputNotExact(String),
    #[error("algebra is not Gorenstein within bound {0}")]
    NotGorensteinWithin(usize),
    #[error("Gorenstein certificate violated: {0}")]
    CertificateViolated(String),
    #[error("biduality map is not an isomorphism")]
    BidualityNotIso,
    #[error("linear system infeasible: {0}")]
    SystemInfeasible(String),
    #[error("identification failed: {0}")]
    IdentificationFailed(String),
    #[error("sequence is not proper: {0}")]
    NotProper(String),
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("validation error: {0}")]
    ValidationError(String),
}

pub type Result<T> = std::result::Result<T, Error>;
