use thiserror::Error;

/// Errors raised by the algebra kernel and the constructions built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unsupported ring: {0}")]
    UnsupportedRing(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("unsupported ring map: {0}")]
    UnsupportedRingMap(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("matrix does not define a morphism: relations are not mapped into relations")]
    NotWellDefined,
    #[error("morphisms do not share a source")]
    SourceMismatch,
    #[error("square does not commute")]
    SquareDoesNotCommute,
    #[error("supplied map is not a retraction")]
    NotARetraction,
    #[error("no retraction and no probe module exhibits a tensor kernel")]
    ProbeInconclusive,
    #[error("decider disagreement: {0}")]
    DeciderDisagreement(String),
    #[error("ring map is not faithfully flat")]
    NotFaithfullyFlat,
    #[error("hypothesis `{hypothesis}` violated at level {level}")]
    HypothesisViolation { hypothesis: String, level: usize },
    #[error("lift failed within horizon {0}: stabilization not certified")]
    LiftFailedAtHorizon(usize),
    #[error("index poset is not directed: {0}")]
    NotDirected(String),
    #[error("directed system axiom violated: {0}")]
    AxiomViolation(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("parts do not form an internal direct sum: {0}")]
    NotInternal(String),
    #[error("endomorphism is not idempotent")]
    NotIdempotent,
    #[error("module is not projective")]
    NotProjective,
    #[error("extended generators do not span the base-changed module")]
    DoesNotSpan,
    #[error("collected components do not span the module")]
    ComponentsDoNotSpan,
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// Internal-consistency failures indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::DeciderDisagreement(_) | Error::ComponentsDoNotSpan | Error::InvariantViolation(_)
        )
    }

    pub fn clause(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::UnsupportedRing(_) => "UnsupportedRing",
            Error::InvalidRing(_) => "InvalidRing",
            Error::UnsupportedRingMap(_) => "UnsupportedRingMap",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::RingMismatch(_) => "RingMismatch",
            Error::NotWellDefined => "NotWellDefined",
            Error::SourceMismatch => "SourceMismatch",
            Error::SquareDoesNotCommute => "SquareDoesNotCommute",
            Error::NotARetraction => "NotARetraction",
            Error::ProbeInconclusive => "ProbeInconclusive",
            Error::DeciderDisagreement(_) => "DeciderDisagreement",
            Error::NotFaithfullyFlat => "NotFaithfullyFlat",
            Error::HypothesisViolation { .. } => "HypothesisViolation",
            Error::LiftFailedAtHorizon(_) => "LiftFailedAtHorizon",
            Error::NotDirected(_) => "NotDirected",
            Error::AxiomViolation(_) => "AxiomViolation",
            Error::PreconditionViolation(_) => "PreconditionViolation",
            Error::InvalidFiltration(_) => "InvalidFiltration",
            Error::NotInternal(_) => "NotInternal",
            Error::NotIdempotent => "NotIdempotent",
            Error::NotProjective => "NotProjective",
            Error::DoesNotSpan => "DoesNotSpan",
            Error::ComponentsDoNotSpan => "ComponentsDoNotSpan",
            Error::InvariantViolation(_) => "InvariantViolation",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
