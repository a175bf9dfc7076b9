//! Statistical phase estimation on a layered noisy circuit simulator.
//!
//! The crate covers the full pipeline:
//!
//! * [`hamiltonian`]: Pauli-sum Hamiltonians and an exact spectral oracle.
//! * [`fourier`]: Fourier coefficients for the CDF filter and for QEEA bump windows.
//! * [`simulator`]: U3/CZ layered circuits, statevector and density propagation,
//!   noise, shot sampling, Hadamard tests and Trotter circuits.
//! * [`compiler`]: variational compilation into a brickwork ansatz.
//! * [`mitigation`]: folding, Pauli twirling, ZNE fits and readout correction.
//! * [`estimator`]: importance sampling, experiment orchestration, CDF
//!   reconstruction and energy extraction.

pub mod compiler;
pub mod error;
pub mod estimator;
pub mod fourier;
pub mod hamiltonian;
pub mod mitigation;
pub mod rng;
pub mod simulator;

pub use error::{Error, ErrorClass, Result};
