//! Structured failures. Every variant carries the offending identifiers so
//! reports can print a witness rather than a bare message.

use serde::Serialize;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Error {
    #[error("duplicate identifier `{id}`")]
    DuplicateId { id: String },

    #[error("object `{object}` has no identity morphism")]
    MissingIdentity { object: String },

    #[error("identity `{identity}` does not act as identity on `{morphism}`")]
    IdentityLaw { identity: String, morphism: String },

    #[error("`{g}`∘`{f}` has wrong endpoints")]
    BadEndpoints { g: String, f: String },

    #[error("composite `{g}`∘`{f}` is not defined")]
    MissingComposite { g: String, f: String },

    #[error("composition is not associative on (`{h}`, `{g}`, `{f}`)")]
    NonAssociative { h: String, g: String, f: String },

    #[error("{what} has {count} morphisms, above the size guard {guard}")]
    SizeGuardExceeded { what: String, count: usize, guard: usize },

    #[error("unknown object `{id}`")]
    UnknownObject { id: String },

    #[error("unknown morphism `{id}`")]
    UnknownMorphism { id: String },

    #[error("functor map is incomplete: `{id}` has no image")]
    IncompleteMap { id: String },

    #[error("functor does not preserve the identity of `{object}`")]
    NotIdentityPreserving { object: String },

    #[error("functor does not preserve `{g}`∘`{f}`")]
    NotCompositionPreserving { g: String, f: String },

    #[error("functor sends `{morphism}` to a morphism with wrong endpoints")]
    FunctorEndpoints { morphism: String },

    #[error("natural transformation fails at {at}")]
    NotNatural { at: String },

    #[error("functors do not share a codomain: `{left}` vs `{right}`")]
    TargetMismatch { left: String, right: String },

    #[error("functors do not share a domain: `{left}` vs `{right}`")]
    SourceMismatch { left: String, right: String },

    #[error("square does not commute at {at}")]
    SquareDoesNotCommute { at: String },

    #[error("`{f}` and `{g}` are not parallel")]
    NotParallel { f: String, g: String },

    #[error("no limit for the diagram at {at}")]
    MissingLimit { at: String },

    #[error("not an adjunction: {detail}")]
    NotAdjoint { detail: String, left_object: String, right_object: String },

    #[error("candidate is not a commuting square: {detail}")]
    NotASquare { detail: String },

    #[error("assumptions fail: {}", failed.join(", "))]
    AssumptionFailure { failed: Vec<String> },

    #[error("generator `{generator}` is not total at `{point}`")]
    NotTotal { generator: String, point: String },

    #[error("truncation 0 leaves the generators unused; use at least 1")]
    ZeroTruncation,

    #[error("parse error at line {line}: {reason}")]
    ParseError { line: usize, reason: String },

    #[error("unsupported format version {found}, expected {expected}")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("i/o error on `{path}`: {reason}")]
    Io { path: String, reason: String },
}

impl Error {
    /// Short machine tag, equal to the serialized `kind` field.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DuplicateId { .. } => "duplicate_id",
            Error::MissingIdentity { .. } => "missing_identity",
            Error::IdentityLaw { .. } => "identity_law",
            Error::BadEndpoints { .. } => "bad_endpoints",
            Error::MissingComposite { .. } => "missing_composite",
            Error::NonAssociative { .. } => "non_associative",
            Error::SizeGuardExceeded { .. } => "size_guard_exceeded",
            Error::UnknownObject { .. } => "unknown_object",
            Error::UnknownMorphism { .. } => "unknown_morphism",
            Error::IncompleteMap { .. } => "incomplete_map",
            Error::NotIdentityPreserving { .. } => "not_identity_preserving",
            Error::NotCompositionPreserving { .. } => "not_composition_preserving",
            Error::FunctorEndpoints { .. } => "functor_endpoints",
            Error::NotNatural { .. } => "not_natural",
            Error::TargetMismatch { .. } => "target_mismatch",
            Error::SourceMismatch { .. } => "source_mismatch",
            Error::SquareDoesNotCommute { .. } => "square_does_not_commute",
            Error::NotParallel { .. } => "not_parallel",
            Error::MissingLimit { .. } => "missing_limit",
            Error::NotAdjoint { .. } => "not_adjoint",
            Error::NotASquare { .. } => "not_a_square",
            Error::AssumptionFailure { .. } => "assumption_failure",
            Error::NotTotal { .. } => "not_total",
            Error::ZeroTruncation => "zero_truncation",
            Error::ParseError { .. } => "parse_error",
            Error::VersionMismatch { .. } => "version_mismatch",
            Error::Io { .. } => "io",
        }
    }

    /// Errors caused by malformed input rather than a failed verification.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::ParseError { .. }
                | Error::VersionMismatch { .. }
                | Error::Io { .. }
                | Error::UnknownObject { .. }
                | Error::UnknownMorphism { .. }
                | Error::DuplicateId { .. }
                | Error::IncompleteMap { .. }
                | Error::SizeGuardExceeded { .. }
                | Error::NotTotal { .. }
                | Error::ZeroTruncation
        )
    }
}
