//! Unitary folding of CZ layers.

use serde::{Deserialize, Serialize};

use crate::simulator::circuit::{GateLayer, LayeredCircuit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldedCircuit {
    pub base: LayeredCircuit,
    pub n: usize,
    /// Noise scale λ = 1 + 2n.
    pub lambda: usize,
    pub circuit: LayeredCircuit,
}

/// Replaces every CZ layer by 2n + 1 copies separated by identity layers.
/// CZ is self-inverse, so U(U†U)ⁿ reduces to repetition.
pub fn fold(circuit: &LayeredCircuit, n: usize) -> FoldedCircuit {
    let width = circuit.n_qubits();
    let mut layers = Vec::with_capacity(circuit.layers().len() * (1 + 2 * n));
    for layer in circuit.layers() {
        match layer {
            GateLayer::EntanglingCz(_) => {
                for copy in 0..(2 * n + 1) {
                    if copy > 0 {
                        layers.push(GateLayer::identity(width));
                    }
                    layers.push(layer.clone());
                }
            }
            other => layers.push(other.clone()),
        }
    }
    let folded = LayeredCircuit::new(width, layers, circuit.ancilla())
        .expect("folding keeps layers valid");
    FoldedCircuit {
        base: circuit.clone(),
        n,
        lambda: 1 + 2 * n,
        circuit: folded,
    }
}

/// Folds for a noise scale λ (odd, ≥ 1).
pub fn fold_to_lambda(circuit: &LayeredCircuit, lambda: usize) -> crate::Result<FoldedCircuit> {
    if lambda == 0 || lambda % 2 == 0 {
        return Err(crate::Error::InvalidArgument(format!(
            "noise scale must be odd and positive, got {lambda}"
        )));
    }
    Ok(fold(circuit, (lambda - 1) / 2))
}
