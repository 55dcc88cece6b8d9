//! Non-randomness for continuous measures on Cantor space, at finite scale.
//!
//! The crate computes the granularity and dissipation functions of a measure
//! and their computable approximations, evaluates the weights of level-n
//! Solovay tests exactly, and replays the two constructions that carry
//! non-randomness from one real to another: padding the bits of a set
//! enumerated above an oracle with long runs of ones, and padding an oracle
//! with its own modulus.
//!
//! All masses and weights are exact dyadic rationals or certified dyadic
//! enclosures; nothing on a decision path uses floating point.

pub mod bits;
mod bounded;
pub mod dyadic;
pub mod error;
pub mod granularity;
pub mod measures;
pub mod modulus;
pub mod rea;
pub mod selfmod;
pub mod solovay;

pub use bits::{concat_blocks, stream_prefix, BitStream, BitString};
pub use dyadic::{dyadic_cmp_pow2, Dyadic, DyadicInterval, Rounding};
pub use error::{Error, Result};
