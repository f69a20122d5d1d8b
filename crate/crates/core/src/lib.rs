//! Multiplicative Ising models on ℕ^d: semigroup chains, transfer matrices,
//! free energies, rate functions and Gibbs measures.

pub mod cli;
pub mod error;
pub mod free_energy;
pub mod gibbs;
pub mod io;
pub mod lattice;
pub mod ldp;
pub mod numerics;
pub mod oracle;
pub mod presets;
pub mod transfer;

pub use error::{Error, Result};
