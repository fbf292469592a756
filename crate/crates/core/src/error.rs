use thiserror::Error;

/// Errors raised by the construction and verification routines.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input: bad vertex index, non-bijective labeling, unparsable label.
    #[error("invalid input: {0}")]
    Input(String),
    /// The requested size exceeds what the exhaustive routines are configured for.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// `contract_to_small_polygon` or `contract_orbit` received an unsuitable argument.
    #[error("contraction error: {0}")]
    Contract(String),
    /// An exact check that must hold by construction failed.
    #[error("integrity violation: {0}")]
    Integrity(String),
    /// Random sampling did not produce a stable answer.
    #[error("sampling error: {0}")]
    Sampling(String),
    /// Subfans are only defined for axially or centrally symmetric orderings.
    #[error("unsupported ordering class: {0}")]
    UnsupportedClass(String),
}

pub type Result<T> = std::result::Result<T, Error>;
