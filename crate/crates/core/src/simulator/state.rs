//! Statevector and density-operator propagation.
//!
//! A density operator on n qubits is stored as a vectorized 2n-qubit state,
//! entry `i·2ⁿ + j` holding ρ_{ij}. Conjugation U ρ U† is then U on the row
//! qubit q and U* on the column qubit n + q.

use num_complex::Complex64;

use super::circuit::{GateLayer, LayeredCircuit};
use super::gates::Mat2;
use super::noise::NoiseModel;
use crate::error::{Error, Result};

/// Largest register simulated as a density operator (dimension 2^{2n}).
pub const MAX_DENSITY_QUBITS: usize = 10;
/// Largest register simulated as a statevector.
pub const MAX_PURE_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub enum SimState {
    Pure { n: usize, amps: Vec<Complex64> },
    Mixed { n: usize, rho: Vec<Complex64> },
}

impl SimState {
    pub fn pure(amps: Vec<Complex64>) -> Result<Self> {
        let n = log2_exact(amps.len())?;
        if n > MAX_PURE_QUBITS {
            return Err(Error::Capacity {
                what: "statevector qubits",
                value: n,
                limit: MAX_PURE_QUBITS,
            });
        }
        Ok(SimState::Pure { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Self::pure(amps)
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            SimState::Pure { n, .. } | SimState::Mixed { n, .. } => *n,
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, SimState::Pure { .. })
    }

    pub fn into_density(self) -> Result<Self> {
        match self {
            SimState::Mixed { .. } => Ok(self),
            SimState::Pure { n, amps } => {
                if n > MAX_DENSITY_QUBITS {
                    return Err(Error::Capacity {
                        what: "density-operator qubits",
                        value: n,
                        limit: MAX_DENSITY_QUBITS,
                    });
                }
                let dim = amps.len();
                let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
                for i in 0..dim {
                    for j in 0..dim {
                        rho[i * dim + j] = amps[i] * amps[j].conj();
                    }
                }
                Ok(SimState::Mixed { n, rho })
            }
        }
    }

    /// Born probabilities of computational basis states.
    pub fn probabilities(&self) -> Vec<f64> {
        match self {
            SimState::Pure { amps, .. } => amps.iter().map(|a| a.norm_sqr()).collect(),
            SimState::Mixed { n, rho } => {
                let dim = 1 << n;
                (0..dim).map(|i| rho[i * dim + i].re).collect()
            }
        }
    }

    /// ⟨ψ|ψ⟩ or Tr ρ.
    pub fn trace(&self) -> f64 {
        self.probabilities().iter().sum()
    }

    /// Exact ⟨Z_q⟩.
    pub fn expectation_z(&self, qubit: usize) -> f64 {
        let n = self.n_qubits();
        let bit = 1usize << (n - 1 - qubit);
        self.probabilities()
            .iter()
            .enumerate()
            .map(|(i, p)| if i & bit == 0 { *p } else { -*p })
            .sum()
    }

    /// Dense density matrix (row-major), for checks.
    pub fn density_matrix(&self) -> Result<Vec<Complex64>> {
        match self.clone().into_density()? {
            SimState::Mixed { rho, .. } => Ok(rho),
            SimState::Pure { .. } => unreachable!(),
        }
    }

    pub fn apply_single(&mut self, qubit: usize, u: &Mat2) {
        match self {
            SimState::Pure { n, amps } => apply_1q(amps, *n, qubit, u),
            SimState::Mixed { n, rho } => {
                let conj = [
                    [u[0][0].conj(), u[0][1].conj()],
                    [u[1][0].conj(), u[1][1].conj()],
                ];
                apply_1q(rho, 2 * *n, qubit, u);
                apply_1q(rho, 2 * *n, *n + qubit, &conj);
            }
        }
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        match self {
            SimState::Pure { n, amps } => apply_cz_raw(amps, *n, a, b),
            SimState::Mixed { n, rho } => {
                apply_cz_raw(rho, 2 * *n, a, b);
                apply_cz_raw(rho, 2 * *n, *n + a, *n + b);
            }
        }
    }

    /// e^{−i(θ/2) Z_a Z_b}.
    pub fn apply_zz(&mut self, a: usize, b: usize, theta: f64) {
        match self {
            SimState::Pure { n, amps } => apply_zz_raw(amps, *n, a, b, theta),
            SimState::Mixed { n, rho } => {
                apply_zz_raw(rho, 2 * *n, a, b, theta);
                apply_zz_raw(rho, 2 * *n, *n + a, *n + b, -theta);
            }
        }
    }

    /// ρ → (1−p)ρ + p (𝟙/4 ⊗ Tr_ab ρ).
    pub fn apply_depolarizing(&mut self, a: usize, b: usize, p: f64) -> Result<()> {
        let (n, rho) = match self {
            SimState::Mixed { n, rho } => (*n, rho),
            SimState::Pure { .. } => {
                return Err(Error::Noise(
                    "depolarizing noise requires the density-operator path".into(),
                ))
            }
        };
        if p == 0.0 {
            return Ok(());
        }
        let dim = 1usize << n;
        let ba = 1usize << (n - 1 - a);
        let bb = 1usize << (n - 1 - b);
        let mask = ba | bb;
        let subs = [0, bb, ba, ba | bb];
        for i0 in (0..dim).filter(|i| i & mask == 0) {
            for j0 in (0..dim).filter(|j| j & mask == 0) {
                let mut diag = Complex64::new(0.0, 0.0);
                for &s in &subs {
                    diag += rho[(i0 | s) * dim + (j0 | s)];
                }
                let add = diag * (p / 4.0);
                for &si in &subs {
                    for &sj in &subs {
                        let idx = (i0 | si) * dim + (j0 | sj);
                        rho[idx] *= 1.0 - p;
                        if si == sj {
                            rho[idx] += add;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn log2_exact(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "state length {len} is not a power of two"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

fn apply_1q(v: &mut [Complex64], n: usize, qubit: usize, u: &Mat2) {
    let bit = 1usize << (n - 1 - qubit);
    let dim = 1usize << n;
    for i in 0..dim {
        if i & bit == 0 {
            let j = i | bit;
            let a0 = v[i];
            let a1 = v[j];
            v[i] = u[0][0] * a0 + u[0][1] * a1;
            v[j] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}

fn apply_cz_raw(v: &mut [Complex64], n: usize, a: usize, b: usize) {
    let mask = (1usize << (n - 1 - a)) | (1usize << (n - 1 - b));
    for (i, x) in v.iter_mut().enumerate() {
        if i & mask == mask {
            *x = -*x;
        }
    }
}

fn apply_zz_raw(v: &mut [Complex64], n: usize, a: usize, b: usize, theta: f64) {
    let ba = 1usize << (n - 1 - a);
    let bb = 1usize << (n - 1 - b);
    let even = Complex64::from_polar(1.0, -theta / 2.0);
    let odd = Complex64::from_polar(1.0, theta / 2.0);
    for (i, x) in v.iter_mut().enumerate() {
        let parity = ((i & ba != 0) as u8) ^ ((i & bb != 0) as u8);
        *x *= if parity == 0 { even } else { odd };
    }
}

/// Applies one layer, with per-CZ noise when given.
pub fn apply_layer(state: &mut SimState, layer: &GateLayer, noise: Option<&NoiseModel>) -> Result<()> {
    match layer {
        GateLayer::SingleQubit(triples) => {
            for (q, e) in triples.iter().enumerate() {
                if !(e.theta == 0.0 && e.phi == 0.0 && e.lambda == 0.0) {
                    state.apply_single(q, &e.matrix());
                }
            }
        }
        GateLayer::EntanglingCz(pairs) => {
            for &(a, b) in pairs {
                state.apply_cz(a, b);
                if let Some(nm) = noise {
                    if nm.coherent_zz_theta != 0.0 {
                        state.apply_zz(a, b, nm.coherent_zz_theta);
                    }
                    if nm.depolarizing_p > 0.0 {
                        state.apply_depolarizing(a, b, nm.depolarizing_p)?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Runs `circuit` on `state` in place.
///
/// Depolarizing noise on a pure state is an error; use [`simulate`] to
/// pick the representation automatically.
pub fn apply_circuit(circuit: &LayeredCircuit, state: &mut SimState, noise: Option<&NoiseModel>) -> Result<()> {
    if state.n_qubits() != circuit.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_qubits(),
            got: state.n_qubits(),
        });
    }
    if let Some(nm) = noise {
        nm.validate()?;
        if nm.needs_density() && state.is_pure() {
            return Err(Error::Noise(
                "depolarizing noise requires the density-operator path".into(),
            ));
        }
    }
    for layer in circuit.layers() {
        apply_layer(state, layer, noise)?;
    }
    Ok(())
}

/// Runs `circuit` from a pure input, switching to a density operator when
/// the noise model needs one.
pub fn simulate(circuit: &LayeredCircuit, input: Vec<Complex64>, noise: Option<&NoiseModel>) -> Result<SimState> {
    let mut state = SimState::pure(input)?;
    if noise.is_some_and(NoiseModel::needs_density) {
        state = state.into_density()?;
    }
    apply_circuit(circuit, &mut state, noise)?;
    Ok(state)
}

/// Dense unitary of a noiseless circuit (columns are images of basis states).
pub fn circuit_unitary(circuit: &LayeredCircuit) -> Result<nalgebra::DMatrix<Complex64>> {
    let n = circuit.n_qubits();
    crate::hamiltonian::check_qubit_limit(n, crate::hamiltonian::DEFAULT_MAX_QUBITS)?;
    let dim = 1usize << n;
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[col] = Complex64::new(1.0, 0.0);
        let mut s = SimState::pure(v)?;
        apply_circuit(circuit, &mut s, None)?;
        if let SimState::Pure { amps, .. } = s {
            for (row, a) in amps.into_iter().enumerate() {
                m[(row, col)] = a;
            }
        }
    }
    Ok(m)
}

/// max |A − e^{iφ}B| after aligning the phase on the largest entry of B.
pub fn phase_aligned_distance(a: &nalgebra::DMatrix<Complex64>, b: &nalgebra::DMatrix<Complex64>) -> f64 {
    let (mut best, mut idx) = (0.0, (0, 0));
    for r in 0..b.nrows() {
        for c in 0..b.ncols() {
            if b[(r, c)].norm() > best {
                best = b[(r, c)].norm();
                idx = (r, c);
            }
        }
    }
    let ph = a[idx] / b[idx];
    let ph = ph / ph.norm();
    (a - b * ph).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
