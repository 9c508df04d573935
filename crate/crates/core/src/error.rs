use thiserror::Error;

/// Errors shared across the library.
///
/// Dimension or ring mismatches between operands are treated as usage errors and
/// panic at the call site; the variants here are conditions a correct caller can
/// legitimately run into.
#[derive(Debug, Error)]
pub enum CoreError {
    /// An operation needed to enumerate a hom-set or element set that is infinite.
    #[error("infinite hom-set or element set: {0}")]
    InfiniteHomSet(String),

    /// A square handed to a lifting or pushout routine does not commute.
    #[error("square does not commute: {0}")]
    NonCommutingSquare(String),

    /// A morphism required to be mono is not.
    #[error("morphism is not mono: {0}")]
    NotMono(String),

    /// A matrix does not define a morphism between the given presentations.
    #[error("matrix does not define a morphism: {0}")]
    NotWellDefined(String),

    /// Mixing traces or configurations of different engine variants.
    #[error("variant mismatch: {0}")]
    VariantMismatch(String),

    /// A staged run hit its stage budget before its stop rule fired.
    /// The boxed value carries the partial trace serialized as JSON.
    #[error("run truncated at stage budget: {0}")]
    Truncated(String),

    /// A configured enumeration bound was exceeded.
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),

    /// Malformed input data (bad ring modulus, ragged matrix, float in JSON, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
