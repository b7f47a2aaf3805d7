//! Statistical-mechanics decoders for random-circuit codes.
//!
//! A code and an error define an Ising-type model with one spin per
//! generator; its partition function in the real semiring gives class
//! probabilities, and in the tropical semiring gives minimum-weight
//! representatives.

pub mod decode;
pub mod exhaustive;
pub mod model;
pub mod network;

pub use decode::{marginal_decode, marginal_log_partitions, minimum_weight_decode};
pub use model::{nishimori_beta, SpinMode, SpinModel, Term};
pub use network::LatticeTensorNetwork;

#[derive(Debug, thiserror::Error)]
pub enum StatmechError {
    #[error(transparent)]
    Core(#[from] rcqec_core::Error),
    #[error("error rate {0} outside (0, 1)")]
    InvalidRate(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("contraction overflowed")]
    Overflow,
}
