//! Simulation and decoding tools for erasure-qubit quantum error correction.
//!
//! The crate is organized bottom-up:
//!
//! - [`pauli`] and [`code`]: symplectic Pauli operators, the four-qubit
//!   example code and rotated surface codes.
//! - [`channel`]: Kraus-form channel calculus for dual-rail qubits, Pauli
//!   twirling and the effective per-step noise seen by the outer code.
//! - [`circuit`]: circuit IR with noise sites and erasure checks, a Pauli-frame
//!   sampler and a stabilizer-tableau reference simulator.
//! - [`decoder`]: decoding graphs, erasure peeling, union-find with erasure
//!   preconditioning, and a brute-force maximum-likelihood oracle.
//! - [`montecarlo`]: logical error estimation, threshold crossings and
//!   scaling fits.
//! - [`config`] and [`cli`]: the run configuration format and the command
//!   implementations behind the `erasure-qec` binary.

pub mod channel;
pub mod circuit;
pub mod cli;
pub mod code;
pub mod config;
pub mod decoder;
pub mod error;
pub mod montecarlo;
pub mod pauli;
pub mod verify;

pub use error::{Error, Result};
