//! Pauli and Clifford algebra, mixed stabilizer states and brickwork
//! random-circuit codes.

pub mod clifford;
pub mod code;
mod error;
pub mod gf2;
pub mod pauli;
pub mod rng;
pub mod state;

pub use clifford::{CliffordTableau, TwoQubitClifford};
pub use code::{
    BrickworkCircuit, Boundary, CircuitCode, CodeDescriptor, InputLayout, PlacedGate, Role,
};
pub use error::Error;
pub use gf2::{BitVec, XorBasis};
pub use pauli::{scalar_commutator, Pauli, PauliOperator};
pub use state::{Basis, MixedStabilizerState};
