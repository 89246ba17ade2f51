//! Memory loss in noisy Clifford circuits with resets.
//!
//! Circuits are layers of Clifford gates followed by single-qubit resets,
//! with every qubit hit by depolarizing noise after each layer. The crate
//! propagates Pauli observables backwards through sampled error
//! configurations to decide whether any information about the input
//! survives, estimates the survival probability, and checks the
//! combinatorial picture against dense density-matrix simulation.

pub mod channels;
pub mod circuit;
pub mod engine;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod pauli;
pub mod scalar;

pub use channels::{Bloch, NoiseModel, ResetSpec};
pub use circuit::{Circuit, ErrorConfig, Layer};
pub use error::{Error, Result};
pub use oracle::DensityMatrix;
pub use pauli::{CliffordTableau, Gate, NamedGate, PauliBits, PauliLabel, PauliString};
pub use scalar::Real;

pub type PauliString64 = PauliString<f64>;
pub type PauliString32 = PauliString<f32>;
pub type Circuit64 = Circuit<f64>;
pub type Circuit32 = Circuit<f32>;
pub type Bloch64 = Bloch<f64>;
pub type Bloch32 = Bloch<f32>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DensityMatrix32 = DensityMatrix<f32>;
