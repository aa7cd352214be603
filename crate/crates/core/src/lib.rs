//! Momentum-space construction of relativistic spin and position operators
//! for a free massive spin-1/2 Dirac particle, with numerical certification
//! of their operator identities.
//!
//! The crate is layered bottom-up:
//!
//! - [`algebra`]: complex 4×4 matrices, first-order jets and differentiable
//!   matrix-valued functions of momentum.
//! - [`diffop`]: momentum-space differential operators with matrix
//!   coefficients (composition, commutators, conjugation, parity).
//! - [`dirac`]: γ matrices, the Dirac Hamiltonian, Poincaré generators,
//!   the Pauli-Lubanski vector and the boost matrix L(p).
//! - [`spincat`]: the catalog of spin and position operators.
//! - [`checks`]: the registry of named identities and the suite runner.
//! - [`zbw`]: one-dimensional wavepacket evolution (Zitterbewegung).
//! - [`cli`]: the command-line front end.

pub mod algebra;
pub mod checks;
pub mod cli;
pub mod diffop;
pub mod dirac;
pub mod error;
pub mod spincat;
pub mod zbw;

pub use error::{Error, Result};
