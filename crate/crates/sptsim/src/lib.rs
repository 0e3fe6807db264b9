//! Simulation library for stabilizer-chain entanglement probes.
//!
//! The crate drives desk-scale experiments on 1D cluster states: plain and
//! symmetry-resolved Renyi entropies estimated from two-copy interference
//! circuits, and single-qubit teleportation through a short measurement
//! wire under symmetric or symmetry-breaking perturbations. Everything can
//! run noiselessly shot by shot, or through a density-matrix path with
//! Kraus channels after each gate plus biased readout, with exact oracle
//! values computed alongside the sampled estimates.
//!
//! The numeric core is generic over the scalar width via [`real::Real`];
//! the aliases below pin the common `f64` instantiations.

pub mod circuits;
pub mod entanglement;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod noise;
pub mod pauli;
pub mod real;
pub mod state;
pub mod symmetry;

pub use error::{Error, Result};
pub use pauli::{Letter, PauliString, Phase};
pub use real::Real;
pub use state::{Gate, KrausChannel, MixedState, PureState, DEFAULT_MAX_QUBITS};
pub use symmetry::{Boundary, ParityKind, ResourceKind};

/// Complex amplitude at the default precision.
pub type Amp64 = num_complex::Complex<f64>;
/// Pure state at the default precision.
pub type PureState64 = state::PureState<f64>;
/// Density matrix at the default precision.
pub type MixedState64 = state::MixedState<f64>;
/// Gate at the default precision.
pub type Gate64 = state::Gate<f64>;
/// Kraus channel at the default precision.
pub type KrausChannel64 = state::KrausChannel<f64>;
