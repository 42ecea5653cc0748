//! Exact-arithmetic toolkit for positivity in real group rings.
//!
//! The crate works with sparse rational elements of a group ring, the
//! augmentation ideal and its powers, and sums of hermitian squares.
//! It builds and bit-exactly verifies order-unit certificates for the
//! family of elements obtained by iterating the positive map
//! `D(m) = d* m d` on diagonal matrices, and it searches for numeric
//! Gram-matrix certificates that are rounded to exact rational ones.

pub mod augmentation;
pub mod certificates;
pub mod cli;
pub mod family;
pub mod gram;
pub mod groups;
pub mod jsonio;
pub mod ringalg;

pub use groups::{GeneratorAlphabet, GroupModel, Word};
pub use ringalg::{RingElement, RingMatrix, Scalar};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rewriting did not terminate within the step budget ({0} steps)")]
    NormalizationBudgetExceeded(u64),
    #[error("element order not decided within cutoff {0}")]
    OrderUndecided(u64),
    #[error("letter {0:?} is not in the generating alphabet")]
    UnknownGenerator(String),
    #[error("elements belong to different group models")]
    GroupMismatch,
    #[error("matrix shapes are incompatible: {0}")]
    ShapeMismatch(String),
    #[error("element is not in the augmentation ideal (augmentation = {0})")]
    NotInAugmentationIdeal(String),
    #[error("g^m is not the identity, torsion witness invalid")]
    InvalidTorsion,
    #[error("affine constraints are inconsistent")]
    InconsistentConstraints,
    #[error("operation requires a finite abelianization witness")]
    WitnessRequired,
    #[error("witness validation failed for generators: {0:?}")]
    InvalidWitness(Vec<String>),
    #[error("operation is not supported for this group model: {0}")]
    UnsupportedModel(String),
    #[error("support basis would exceed the size guard ({0} elements)")]
    BasisTooLarge(usize),
    #[error("target support is not covered by basis products")]
    SupportNotCovered,
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("entry does not decompose in the requested augmentation power")]
    NotInPower,
    #[error("no certificate found for a diagonal entry: {0}")]
    DiagonalUncertified(String),
    #[error("lambda grid exhausted without an exact certificate")]
    SearchFailed,
    #[error("invalid group definition: {0}")]
    InvalidGroup(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
