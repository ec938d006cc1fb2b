use thiserror::Error;

/// Errors raised by constructions and decision procedures.
///
/// Negative mathematical verdicts are not errors; they come back as
/// [`crate::Outcome::Fails`] with a witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid signature: {0}")]
    Signature(String),

    #[error("invalid algebra `{name}`: {reason}")]
    Algebra { name: String, reason: String },

    #[error("signature mismatch between `{left}` and `{right}`")]
    SignatureMismatch { left: String, right: String },

    #[error("element {element} out of range for algebra `{algebra}` of size {size}")]
    ElementOutOfRange {
        algebra: String,
        element: usize,
        size: usize,
    },

    #[error("map `{source_name}` -> `{target}` is not a homomorphism: {reason}")]
    NotHomomorphism {
        source_name: String,
        target: String,
        reason: String,
    },

    #[error("partition is not a congruence of `{algebra}`: {reason}")]
    NotCongruence { algebra: String, reason: String },

    #[error(
        "algebra `{0}` is not pointed (its constants do not generate a one-element subalgebra)"
    )]
    NotPointed(String),

    #[error("map is not surjective (not an epimorphism)")]
    NotEpi,

    #[error("unbound variable {0} in term")]
    UnboundVariable(usize),

    #[error("arity mismatch for `{symbol}`: expected {expected}, got {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },

    #[error("unknown operation symbol `{0}`")]
    UnknownSymbol(String),

    #[error("size cap exceeded: {what} needs more than {cap} elements (upper bound {bound})")]
    CapExceeded {
        what: String,
        cap: usize,
        bound: String,
    },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("base mismatch: points live over different base algebras")]
    BaseMismatch,

    #[error("invalid parallel pair: {0}")]
    InvalidPair(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("empty pullback (carriers must be non-empty)")]
    EmptyPullback,

    #[error("malformed input: {0}")]
    Format(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
