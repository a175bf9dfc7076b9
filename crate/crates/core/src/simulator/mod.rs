//! Layered U3/CZ circuit simulation with noise.

pub mod circuit;
pub mod gates;
pub mod hadamard;
pub mod measure;
pub mod noise;
pub mod state;
pub mod trotter;

pub use circuit::{GateLayer, LayeredCircuit};
pub use gates::{u3_matrix, Euler};
pub use hadamard::{
    controlled_evolution_unitary, hadamard_expectation, hadamard_test, ControlledOp, HadamardBasis,
};
pub use measure::{measure_shots, ShotResult};
pub use noise::{NoiseModel, ReadoutError};
pub use state::{apply_circuit, circuit_unitary, simulate, SimState};
pub use trotter::{trotter_circuit, trotter_step_circuit};
