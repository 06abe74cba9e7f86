use thiserror::Error;

/// Everything that can go wrong in the toolkit.
///
/// Variants are grouped by how a caller is expected to react: bad input,
/// a computation that could not be certified, or a request that exceeds a
/// resource cap. [`Error::kind`] exposes that grouping.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument {z} is within 1e-9 of the pole at 1")]
    PoleProximity { z: String },

    #[error("divergent: {0}")]
    Divergent(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("not admissible: {0}")]
    NotAdmissible(String),

    #[error("no analytic certificate: {0}")]
    NoCertificate(String),

    #[error("insufficient horizon: {0}")]
    InsufficientHorizon(String),

    #[error("interval straddles a cylinder boundary after {} determined digit(s)", determined.len())]
    BoundaryAmbiguity { determined: Vec<u64> },

    #[error("did not converge: {0}")]
    NoConvergence(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("i/o error: {0}")]
    Io(String),
}

/// Coarse classification of an [`Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    InvalidInput,
    Uncertified,
    Resource,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_)
            | Error::Domain(_)
            | Error::PoleProximity { .. }
            | Error::Divergent(_)
            | Error::Precondition(_)
            | Error::NotAdmissible(_)
            | Error::NoCertificate(_)
            | Error::Io(_) => ErrorKind::InvalidInput,
            Error::InsufficientHorizon(_)
            | Error::BoundaryAmbiguity { .. }
            | Error::NoConvergence(_) => ErrorKind::Uncertified,
            Error::ResourceCap(_) => ErrorKind::Resource,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
