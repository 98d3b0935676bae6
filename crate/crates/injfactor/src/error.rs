use thiserror::Error;

use crate::element::Element;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("tag label {0:?} already occurs in the carrier")]
    TagCollision(String),
    #[error("cardinal subtraction underflow")]
    Underflow,
    #[error("type of {0} has no infinite cycle")]
    NoInfiniteCycle(String),
    #[error("coimage mismatch: fwd(f) + fwd(g) != fwd(h)")]
    CoimageMismatch,
    #[error("unsupported: both inputs are permutations")]
    UnsupportedDrosteCase,
    #[error("element {0} is not in the carrier")]
    OutOfCarrier(Element),
    #[error("carrier mismatch")]
    CarrierMismatch,
    #[error("cycle type describes a finite or empty set")]
    EmptyType,
    #[error("certificate contradicted at {0}: {1}")]
    CertificateContradiction(Element, String),
    #[error("map carries no certificate")]
    Uncertified,
    #[error("maps are not equivalent")]
    NotEquivalent,
    #[error("invalid count: {0}")]
    InvalidK(String),
    #[error("witness scan exceeded its budget")]
    WitnessExhausted,
    #[error("verification failed at {0}")]
    VerificationFailed(Element),
    #[error("odd coimage: a square needs an even or infinite count of forward cycles")]
    OddCoimage,
    #[error("unsupported: the target is a permutation")]
    OreBijectiveCaseUnsupported,
    #[error("window of {0} nodes exceeds the limit of 10000")]
    WindowTooLarge(usize),
}
