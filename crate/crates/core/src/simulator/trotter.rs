//! Controlled first-order Trotter steps for H = c₁Z + c₂X on one data qubit.
//!
//! One step implements controlled-[R_X(2c₂τ) R_Z(2c₁τ)] with four CZ layers
//! (ancilla = qubit 0, data = qubit 1), using
//! H_a · CZ · R_X(θ)_a · CZ · H_a = e^{−i(θ/2) Z_a Z_d}.

use super::circuit::{GateLayer, LayeredCircuit};
use super::gates::{self, Euler, Mat2};
use crate::error::Result;

fn layer(anc: Mat2, data: Mat2) -> GateLayer {
    GateLayer::SingleQubit(vec![Euler::from_matrix(&anc), Euler::from_matrix(&data)])
}

fn cz() -> GateLayer {
    GateLayer::EntanglingCz(vec![(0, 1)])
}

/// One controlled Trotter step; exactly four CZ layers.
pub fn trotter_step_circuit(c1: f64, c2: f64, tau: f64) -> Result<LayeredCircuit> {
    let id = gates::identity();
    let h = gates::hadamard();
    let layers = vec![
        layer(h, id),
        cz(),
        layer(gates::rx(-c1 * tau), gates::rz(c1 * tau)),
        cz(),
        layer(id, h),
        cz(),
        layer(gates::rx(-c2 * tau), gates::rz(c2 * tau)),
        cz(),
        layer(h, h),
    ];
    LayeredCircuit::new(2, layers, 0)
}

/// k controlled Trotter steps with boundary layers merged; CZ depth 4k.
pub fn trotter_circuit(c1: f64, c2: f64, tau: f64, k: usize) -> Result<LayeredCircuit> {
    let step = trotter_step_circuit(c1, c2, tau)?;
    let mut layers = Vec::with_capacity(8 * k + 1);
    for _ in 0..k {
        layers.extend(step.layers().iter().cloned());
    }
    Ok(LayeredCircuit::new(2, layers, 0)?.canonicalize())
}

/// The data-qubit operator R_X(2c₂τ) R_Z(2c₁τ) of one step.
pub fn trotter_step_unitary(c1: f64, c2: f64, tau: f64) -> Mat2 {
    gates::mul(&gates::rx(2.0 * c2 * tau), &gates::rz(2.0 * c1 * tau))
}

/// Eigenphases ±a of one step, a = arccos(cos(c₂τ) cos(c₁τ)).
pub fn trotter_eigenphases(c1: f64, c2: f64, tau: f64) -> [f64; 2] {
    let a = ((c2 * tau).cos() * (c1 * tau).cos()).clamp(-1.0, 1.0).acos();
    [-a, a]
}
