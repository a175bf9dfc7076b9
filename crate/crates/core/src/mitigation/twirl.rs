//! Pauli twirling of CZ layers merged into the neighbouring U3 layers.
//!
//! A Pauli P_a ⊗ P_b before a CZ is undone by P'_a ⊗ P'_b after it, where
//! CZ maps X⊗I → X⊗Z and I⊗X → Z⊗X (Z and I are fixed, Y behaves like X).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Pauli;
use crate::simulator::circuit::{GateLayer, LayeredCircuit};
use crate::simulator::gates::{self, Euler, Mat2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwirledCircuit {
    pub base: LayeredCircuit,
    /// One letter per qubit for each CZ layer, in circuit order.
    pub pauli_draws: Vec<Vec<Pauli>>,
    pub merged: LayeredCircuit,
}

/// Paulis after a CZ layer that cancel `before` (phases ignored).
pub fn cz_correction(pairs: &[(usize, usize)], before: &[Pauli]) -> Vec<Pauli> {
    let mut after = before.to_vec();
    for &(a, b) in pairs {
        if before[b].flips() {
            after[a] = after[a].mul_unphased(Pauli::Z);
        }
        if before[a].flips() {
            after[b] = after[b].mul_unphased(Pauli::Z);
        }
    }
    after
}

pub fn draw_paulis<R: Rng>(n: usize, rng: &mut R) -> Vec<Pauli> {
    (0..n).map(|_| Pauli::ALL[rng.gen_range(0..4)]).collect()
}

/// Twirls with explicit draws (one per CZ layer).
pub fn twirl_with(circuit: &LayeredCircuit, draws: Vec<Vec<Pauli>>) -> Result<TwirledCircuit> {
    if !circuit.is_canonical() {
        return Err(Error::Circuit("twirling needs a canonical circuit".into()));
    }
    let n = circuit.n_qubits();
    if draws.len() != circuit.cz_layer_count() || draws.iter().any(|d| d.len() != n) {
        return Err(Error::Circuit("Pauli draws do not match circuit".into()));
    }
    let layers = circuit.layers();
    let mut mats: Vec<Vec<Mat2>> = layers
        .iter()
        .step_by(2)
        .map(|l| match l {
            GateLayer::SingleQubit(t) => t.iter().map(Euler::matrix).collect(),
            GateLayer::EntanglingCz(_) => unreachable!("canonical circuit"),
        })
        .collect();
    for (i, draw) in draws.iter().enumerate() {
        let pairs = match &layers[2 * i + 1] {
            GateLayer::EntanglingCz(p) => p,
            GateLayer::SingleQubit(_) => unreachable!("canonical circuit"),
        };
        let after = cz_correction(pairs, draw);
        for q in 0..n {
            mats[i][q] = gates::mul(&draw[q].matrix(), &mats[i][q]);
            mats[i + 1][q] = gates::mul(&mats[i + 1][q], &after[q].matrix());
        }
    }
    let mut merged = Vec::with_capacity(layers.len());
    for (i, layer) in layers.iter().enumerate() {
        if i % 2 == 0 {
            merged.push(GateLayer::SingleQubit(
                mats[i / 2].iter().map(Euler::from_matrix).collect(),
            ));
        } else {
            merged.push(layer.clone());
        }
    }
    Ok(TwirledCircuit {
        base: circuit.clone(),
        pauli_draws: draws,
        merged: LayeredCircuit::new(n, merged, circuit.ancilla())?,
    })
}

/// Draws uniform Paulis for every CZ layer and merges them.
pub fn twirl<R: Rng>(circuit: &LayeredCircuit, rng: &mut R) -> Result<TwirledCircuit> {
    let draws = (0..circuit.cz_layer_count())
        .map(|_| draw_paulis(circuit.n_qubits(), rng))
        .collect();
    twirl_with(circuit, draws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::state::{circuit_unitary, phase_aligned_distance};
    use crate::simulator::trotter::trotter_circuit;
    use rand::SeedableRng;

    #[test]
    fn correction_table() {
        let pairs = [(0, 1)];
        use Pauli::*;
        assert_eq!(cz_correction(&pairs, &[X, I]), vec![X, Z]);
        assert_eq!(cz_correction(&pairs, &[I, X]), vec![Z, X]);
        assert_eq!(cz_correction(&pairs, &[Y, I]), vec![Y, Z]);
        assert_eq!(cz_correction(&pairs, &[I, Y]), vec![Z, Y]);
        assert_eq!(cz_correction(&pairs, &[Z, Z]), vec![Z, Z]);
        assert_eq!(cz_correction(&pairs, &[X, X]), vec![Y, Y]);
    }

    #[test]
    fn identity_draw_keeps_circuit() {
        let c = trotter_circuit(0.121256, 0.259138, 3.94, 1).unwrap();
        let draws = vec![vec![Pauli::I; 2]; 4];
        let t = twirl_with(&c, draws).unwrap();
        let a = circuit_unitary(&t.merged).unwrap();
        let b = circuit_unitary(&c).unwrap();
        assert!(phase_aligned_distance(&a, &b) < 1e-14);
    }

    #[test]
    fn x_before_cz_is_conjugated_exactly() {
        // 4×4 check: (X⊗Z) CZ (X⊗I) = CZ up to phase
        let cz = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            [1.0, 1.0, 1.0, -1.0].iter().map(|v| num_complex::Complex64::new(*v, 0.0)).collect(),
        ));
        let kron = |a: &Mat2, b: &Mat2| nalgebra::DMatrix::from_fn(4, 4, |i, j| a[i >> 1][j >> 1] * b[i & 1][j & 1]);
        let before = kron(&Pauli::X.matrix(), &Pauli::I.matrix());
        let after = kron(&Pauli::X.matrix(), &Pauli::Z.matrix());
        let total = &after * &cz * &before;
        assert!(phase_aligned_distance(&total, &cz) < 1e-15);
    }

    #[test]
    fn random_twirls_preserve_unitary() {
        let c = trotter_circuit(0.3, -0.2, 1.7, 2).unwrap();
        let u = circuit_unitary(&c).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let t = twirl(&c, &mut rng).unwrap();
            assert_eq!(t.merged.layers().len(), c.layers().len());
            assert!(phase_aligned_distance(&circuit_unitary(&t.merged).unwrap(), &u) < 1e-12);
        }
    }

    #[test]
    fn rejects_non_canonical() {
        let c = LayeredCircuit::new(2, vec![GateLayer::EntanglingCz(vec![(0, 1)])], 0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert!(twirl(&c, &mut rng).is_err());
    }
}
