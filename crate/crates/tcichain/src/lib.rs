//! Classical laboratory for a transverse-field Ising chain with a three-spin
//! deformation, tuned to its tricritical point where the low-energy physics
//! carries an emergent supersymmetry.
//!
//! The crate covers the full workflow:
//!
//! * [`pauli`] - phase-exact Pauli-string algebra and the Jordan-Wigner
//!   compiler from Majorana monomials to spin observables.
//! * [`model`] - the chain Hamiltonian in both spin and Majorana-image form,
//!   supercharges, supercurrents, and their correlator operators.
//! * [`exact`] - dense diagonalization: parity-resolved spectra, gap ratios,
//!   reduced density matrices, entanglement entropy, and a Lanczos path for
//!   ground states beyond comfortable dense sizes.
//! * [`sim`] - statevector simulation of the layered variational circuit,
//!   product-basis sampling, readout-noise injection and mitigation.
//! * [`vqe`] - cost functions (energy, overlap, deflation), adjoint-mode
//!   gradients, and deterministic optimizers with layerwise warm starts.
//! * [`analysis`] - correlator series and power-law fits, Shannon/entanglement
//!   entropies, mutual-information central-charge fits, 1/L extrapolation.
//! * [`experiment`] - config-driven runs that emit CSV/JSON artifacts with a
//!   digest manifest; the `tcichain` binary is a thin front end over it.
//!
//! Start with the `examples/` directory; each file there exercises one major
//! capability end to end and prints the quantities it computes.

pub mod analysis;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod lapack;
pub mod model;
pub mod pauli;
pub mod rng;
pub mod sim;
pub mod vqe;

pub use error::{Error, Result};
