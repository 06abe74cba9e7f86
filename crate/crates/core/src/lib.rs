//! Exact continued-fraction arithmetic, zeta-tail numerics and the
//! covering/construction machinery for sets of reals whose partial
//! quotients tend to infinity along an index sequence.
//!
//! Every inequality check keeps its left side in exact rationals and
//! rounds the transcendental side against itself, so a reported pass is a
//! true pass.

pub mod cf;
pub mod construction;
pub mod dimension;
pub mod error;
pub mod exact;
pub mod hirst;
pub mod hp;
pub mod sequences;
pub mod special;

pub use cf::{Convergent, Cylinder, PartialQuotients};
pub use error::{Error, ErrorKind, Result};
pub use exact::Rational;
pub use hp::Real;
pub use sequences::{DigitSet, IndexSequence};
pub use special::PrecisionContext;
