//! Hadamard tests for g_k = ⟨ψ|e^{−iτHk}|ψ⟩.
//!
//! The ancilla (qubit 0) starts in |+⟩, a controlled operation acts on the
//! register, then V ∈ {𝟙, S†} and H are applied to the ancilla before it is
//! measured. ⟨Z_anc⟩ equals Re g for V = 𝟙 and Im g for V = S†.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::circuit::{GateLayer, LayeredCircuit};
use super::gates::{self, Mat2};
use super::measure::measure_qubits;
use super::noise::NoiseModel;
use super::state::{apply_circuit, SimState};
use crate::error::{Error, Result};
use crate::hamiltonian::{check_qubit_limit, evolution_operator, PauliSum, DEFAULT_MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HadamardBasis {
    /// V = 𝟙, estimates Re g.
    X,
    /// V = S†, estimates Im g.
    Y,
}

impl HadamardBasis {
    /// Final ancilla rotation H·V.
    pub fn final_gate(self) -> Mat2 {
        match self {
            HadamardBasis::X => gates::hadamard(),
            HadamardBasis::Y => gates::mul(&gates::hadamard(), &gates::s_dagger()),
        }
    }
}

/// The controlled operation in a Hadamard test.
#[derive(Debug, Clone, Copy)]
pub enum ControlledOp<'a> {
    /// Dense unitary on ancilla + register; noise other than readout does not apply.
    Unitary(&'a DMatrix<Complex64>),
    /// Layered circuit with the ancilla as qubit 0.
    Circuit(&'a LayeredCircuit),
}

impl ControlledOp<'_> {
    pub fn n_qubits(&self) -> usize {
        match self {
            ControlledOp::Unitary(u) => u.nrows().trailing_zeros() as usize,
            ControlledOp::Circuit(c) => c.n_qubits(),
        }
    }
}

/// 𝟙 ⊕ U with the ancilla (most significant qubit) as control.
pub fn controlled(u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = u.nrows();
    let mut m = DMatrix::<Complex64>::identity(2 * d, 2 * d);
    m.view_mut((d, d), (d, d)).copy_from(u);
    m
}

/// Controlled e^{−iτHk} on ancilla + data.
pub fn controlled_evolution_unitary(h: &PauliSum, tau: f64, k: i64) -> Result<DMatrix<Complex64>> {
    check_qubit_limit(h.n_qubits() + 1, DEFAULT_MAX_QUBITS)?;
    Ok(controlled(&evolution_operator(h, tau * k as f64)?))
}

/// a ⊗ ψ for a single-qubit ancilla state `a`.
pub fn ancilla_product(a: [Complex64; 2], psi: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(2 * psi.len());
    out.extend(psi.iter().map(|x| a[0] * x));
    out.extend(psi.iter().map(|x| a[1] * x));
    out
}

/// |+⟩ ⊗ ψ.
pub fn plus_input(psi: &[Complex64]) -> Vec<Complex64> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    ancilla_product([h, h], psi)
}

/// Full Hadamard-test circuit around a controlled circuit, from |0⟩⊗ψ.
pub fn hadamard_test_circuit(controlled: &LayeredCircuit, basis: HadamardBasis) -> Result<LayeredCircuit> {
    let n = controlled.n_qubits();
    let anc = controlled.ancilla();
    let mut layers = vec![GateLayer::single_on(n, anc, &gates::hadamard())];
    layers.extend(controlled.layers().iter().cloned());
    layers.push(GateLayer::single_on(n, anc, &basis.final_gate()));
    Ok(LayeredCircuit::new(n, layers, anc)?.canonicalize())
}

/// States just before ancilla measurement for the X and Y bases.
pub fn hadamard_final_states(
    op: ControlledOp<'_>,
    psi: &[Complex64],
    noise: Option<&NoiseModel>,
) -> Result<[SimState; 2]> {
    let n = op.n_qubits();
    if psi.len() * 2 != 1usize << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << (n - 1),
            got: psi.len(),
        });
    }
    let input = plus_input(psi);
    let mut state = match op {
        ControlledOp::Unitary(u) => {
            let out = u * DVector::from_vec(input);
            SimState::pure(out.iter().cloned().collect())?
        }
        ControlledOp::Circuit(c) => {
            if c.ancilla() != 0 {
                return Err(Error::Circuit("Hadamard tests expect the ancilla on qubit 0".into()));
            }
            let mut s = SimState::pure(input)?;
            if noise.is_some_and(NoiseModel::needs_density) {
                s = s.into_density()?;
            }
            apply_circuit(c, &mut s, noise)?;
            s
        }
    };
    let mut y = state.clone();
    state.apply_single(0, &HadamardBasis::X.final_gate());
    y.apply_single(0, &HadamardBasis::Y.final_gate());
    Ok([state, y])
}

/// Exact recorded ⟨Z_anc⟩ for both bases, readout included.
pub fn hadamard_expectations(
    op: ControlledOp<'_>,
    psi: &[Complex64],
    noise: Option<&NoiseModel>,
    bitflip_average: bool,
) -> Result<[f64; 2]> {
    let states = hadamard_final_states(op, psi, noise)?;
    let ro = noise.map(|n| n.readout_for(0)).unwrap_or_default();
    Ok([
        ro.expected_z(states[0].expectation_z(0), bitflip_average),
        ro.expected_z(states[1].expectation_z(0), bitflip_average),
    ])
}

/// Exact recorded ⟨Z_anc⟩ in one basis.
pub fn hadamard_expectation(
    op: ControlledOp<'_>,
    psi: &[Complex64],
    basis: HadamardBasis,
    noise: Option<&NoiseModel>,
    bitflip_average: bool,
) -> Result<f64> {
    let e = hadamard_expectations(op, psi, noise, bitflip_average)?;
    Ok(match basis {
        HadamardBasis::X => e[0],
        HadamardBasis::Y => e[1],
    })
}

/// Shot-based ±1 average in one basis.
pub fn hadamard_test<R: Rng>(
    op: ControlledOp<'_>,
    psi: &[Complex64],
    basis: HadamardBasis,
    shots: u64,
    noise: Option<&NoiseModel>,
    bitflip_average: bool,
    rng: &mut R,
) -> Result<f64> {
    let states = hadamard_final_states(op, psi, noise)?;
    let state = match basis {
        HadamardBasis::X => &states[0],
        HadamardBasis::Y => &states[1],
    };
    let ro = noise.map(|n| n.readout_for(0)).unwrap_or_default();
    measure_qubits(state, &[0], &[ro], shots, bitflip_average, rng)?.z_mean()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{basis_state, eigh, parse_hamiltonian, spectral_measure, to_dense};
    use rand::SeedableRng;

    #[test]
    fn k_zero_is_identity() {
        let h = parse_hamiltonian("0.3 XZ\n0.2 YY").unwrap();
        let u = controlled_evolution_unitary(&h, 1.0, 0).unwrap();
        let id = DMatrix::<Complex64>::identity(8, 8);
        assert!((u - id).iter().all(|z| z.norm() < 1e-13));
        let psi = basis_state("01").unwrap();
        let u = controlled_evolution_unitary(&h, 1.0, 0).unwrap();
        let e = hadamard_expectations(ControlledOp::Unitary(&u), &psi, None, false).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-13 && e[1].abs() < 1e-13);
    }

    #[test]
    fn eigenstate_phases() {
        let h = parse_hamiltonian("0.121256 Z\n0.259138 X").unwrap();
        let (vals, vecs) = eigh(&to_dense(&h).unwrap());
        let psi: Vec<Complex64> = vecs.column(0).iter().cloned().collect();
        let tau = 3.943;
        for k in [1, 2, 7] {
            let u = controlled_evolution_unitary(&h, tau, k).unwrap();
            let e = hadamard_expectations(ControlledOp::Unitary(&u), &psi, None, false).unwrap();
            let a = tau * vals[0] * k as f64;
            assert!((e[0] - a.cos()).abs() < 1e-12);
            assert!((e[1] + a.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn h2_data_block_eigenphases() {
        let h = parse_hamiltonian("0.121256 Z\n0.259138 X").unwrap();
        let tau = 1.5 / (0.121256 + 0.259138);
        let u = controlled_evolution_unitary(&h, tau, 1).unwrap();
        let block = u.view((2, 2), (2, 2)).into_owned();
        let tr = block[(0, 0)] + block[(1, 1)];
        // eigenphases ±a of an SU(2) block: trace = 2 cos a
        let a = (tr.re / 2.0).acos();
        assert!((a - 1.128189).abs() < 1e-5, "{a}");
    }

    #[test]
    fn matches_spectral_oracle() {
        let h = parse_hamiltonian("0.121256 Z\n0.259138 X").unwrap();
        let psi = basis_state("0").unwrap();
        let sd = spectral_measure(&h, 3.943, &psi).unwrap();
        let u = controlled_evolution_unitary(&h, 3.943, 1).unwrap();
        let e = hadamard_expectations(ControlledOp::Unitary(&u), &psi, None, false).unwrap();
        let g = sd.g(1);
        assert!((e[0] - g.re).abs() < 1e-12);
        assert!((e[1] - g.im).abs() < 1e-12);
    }

    #[test]
    fn shots_converge_to_expectation() {
        let h = parse_hamiltonian("0.5 X\n0.2 Z").unwrap();
        let psi = basis_state("0").unwrap();
        let u = controlled_evolution_unitary(&h, 1.0, 3).unwrap();
        let exact = hadamard_expectation(ControlledOp::Unitary(&u), &psi, HadamardBasis::Y, None, false).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let shots = 100_000;
        let est = hadamard_test(ControlledOp::Unitary(&u), &psi, HadamardBasis::Y, shots, None, true, &mut rng).unwrap();
        assert!((est - exact).abs() < 4.0 / (shots as f64).sqrt());
    }
}
