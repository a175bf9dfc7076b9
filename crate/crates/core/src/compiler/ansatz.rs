//! Brickwork U3/CZ ansatz with an adjoint-mode gradient.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::circuit::{GateLayer, LayeredCircuit};
use crate::simulator::gates::{self, Euler, Mat2};

/// Alternating brickwork: even CZ layers pair (0,1),(2,3),…; odd layers
/// pair (1,2),(3,4),…. With two qubits every layer is (0,1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrickworkAnsatz {
    pub n_qubits: usize,
    pub n_cz_layers: usize,
}

impl BrickworkAnsatz {
    pub fn new(n_qubits: usize, n_cz_layers: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::InvalidArgument("ansatz needs at least two qubits".into()));
        }
        Ok(Self {
            n_qubits,
            n_cz_layers,
        })
    }

    pub fn n_params(&self) -> usize {
        3 * self.n_qubits * (self.n_cz_layers + 1)
    }

    pub fn cz_pairs(&self, layer: usize) -> Vec<(usize, usize)> {
        let start = if layer % 2 == 1 && self.n_qubits > 2 { 1 } else { 0 };
        (start..self.n_qubits - 1).step_by(2).map(|a| (a, a + 1)).collect()
    }

    fn check(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::DimensionMismatch {
                expected: self.n_params(),
                got: params.len(),
            });
        }
        Ok(())
    }

    fn triple(&self, params: &[f64], layer: usize, qubit: usize) -> Euler {
        let o = 3 * (layer * self.n_qubits + qubit);
        Euler::new(params[o], params[o + 1], params[o + 2])
    }

    /// Layered circuit with the ancilla on qubit 0.
    pub fn materialize(&self, params: &[f64]) -> Result<LayeredCircuit> {
        self.check(params)?;
        let mut layers = Vec::with_capacity(2 * self.n_cz_layers + 1);
        for s in 0..=self.n_cz_layers {
            layers.push(GateLayer::SingleQubit(
                (0..self.n_qubits).map(|q| self.triple(params, s, q)).collect(),
            ));
            if s < self.n_cz_layers {
                layers.push(GateLayer::EntanglingCz(self.cz_pairs(s)));
            }
        }
        LayeredCircuit::new(self.n_qubits, layers, 0)
    }

    /// Ũ(p)|ψ⟩.
    pub fn apply(&self, params: &[f64], state: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check(params)?;
        if state.len() != 1 << self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.n_qubits,
                got: state.len(),
            });
        }
        let mut v = state.to_vec();
        for s in 0..=self.n_cz_layers {
            for q in 0..self.n_qubits {
                apply_1q(&mut v, self.n_qubits, q, &self.triple(params, s, q).matrix());
            }
            if s < self.n_cz_layers {
                for (a, b) in self.cz_pairs(s) {
                    apply_cz(&mut v, self.n_qubits, a, b);
                }
            }
        }
        Ok(v)
    }

    /// ‖t − Ũ(p)ψ‖.
    pub fn loss(&self, params: &[f64], target: &[Complex64], input: &[Complex64]) -> Result<f64> {
        Ok(self.loss_squared(params, target, input)?.sqrt())
    }

    pub fn loss_squared(&self, params: &[f64], target: &[Complex64], input: &[Complex64]) -> Result<f64> {
        let out = self.apply(params, input)?;
        if target.len() != out.len() {
            return Err(Error::DimensionMismatch {
                expected: out.len(),
                got: target.len(),
            });
        }
        Ok(out.iter().zip(target).map(|(a, b)| (a - b).norm_sqr()).sum())
    }

    /// ‖t − Ũψ‖² and its gradient by one forward and one backward sweep.
    pub fn loss_and_gradient(
        &self,
        params: &[f64],
        target: &[Complex64],
        input: &[Complex64],
    ) -> Result<(f64, Vec<f64>)> {
        let n = self.n_qubits;
        let mut phi = self.apply(params, input)?;
        if target.len() != phi.len() {
            return Err(Error::DimensionMismatch {
                expected: phi.len(),
                got: target.len(),
            });
        }
        let f: f64 = phi.iter().zip(target).map(|(a, b)| (a - b).norm_sqr()).sum();
        let mut grad = vec![0.0; params.len()];
        let mut lam = target.to_vec();
        for s in (0..=self.n_cz_layers).rev() {
            // φ: state just after single-qubit layer s; λ: target pulled back to the same point
            for q in 0..n {
                let e = self.triple(params, s, q);
                let u = e.matrix();
                let ud = gates::adjoint(&u);
                let ds = gates::u3_derivatives(e.theta, e.phi, e.lambda);
                let o = 3 * (s * n + q);
                for (i, d) in ds.iter().enumerate() {
                    let m = gates::mul(d, &ud);
                    grad[o + i] = -2.0 * braket_1q(&lam, &phi, n, q, &m).re;
                }
            }
            for q in 0..n {
                let ud = gates::adjoint(&self.triple(params, s, q).matrix());
                apply_1q(&mut phi, n, q, &ud);
                apply_1q(&mut lam, n, q, &ud);
            }
            if s > 0 {
                for (a, b) in self.cz_pairs(s - 1) {
                    apply_cz(&mut phi, n, a, b);
                    apply_cz(&mut lam, n, a, b);
                }
            }
        }
        Ok((f, grad))
    }
}

fn apply_1q(v: &mut [Complex64], n: usize, qubit: usize, u: &Mat2) {
    let bit = 1usize << (n - 1 - qubit);
    for i in 0..v.len() {
        if i & bit == 0 {
            let j = i | bit;
            let (a0, a1) = (v[i], v[j]);
            v[i] = u[0][0] * a0 + u[0][1] * a1;
            v[j] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}

fn apply_cz(v: &mut [Complex64], n: usize, a: usize, b: usize) {
    let mask = (1usize << (n - 1 - a)) | (1usize << (n - 1 - b));
    for (i, x) in v.iter_mut().enumerate() {
        if i & mask == mask {
            *x = -*x;
        }
    }
}

/// ⟨λ| M_q |φ⟩ for a single-qubit operator M on qubit q.
fn braket_1q(lam: &[Complex64], phi: &[Complex64], n: usize, qubit: usize, m: &Mat2) -> Complex64 {
    let bit = 1usize << (n - 1 - qubit);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..phi.len() {
        if i & bit == 0 {
            let j = i | bit;
            let (a0, a1) = (phi[i], phi[j]);
            acc += lam[i].conj() * (m[0][0] * a0 + m[0][1] * a1);
            acc += lam[j].conj() * (m[1][0] * a0 + m[1][1] * a1);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::state::simulate;
    use rand::{Rng, SeedableRng};

    fn random_params(a: &BrickworkAnsatz, seed: u64) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..a.n_params()).map(|_| rng.gen_range(-3.2..3.2)).collect()
    }

    fn random_state(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<Complex64> = (0..1 << n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        v
    }

    #[test]
    fn parameter_count_and_pattern() {
        let a = BrickworkAnsatz::new(5, 3).unwrap();
        assert_eq!(a.n_params(), 60);
        assert_eq!(a.cz_pairs(0), vec![(0, 1), (2, 3)]);
        assert_eq!(a.cz_pairs(1), vec![(1, 2), (3, 4)]);
        assert_eq!(BrickworkAnsatz::new(2, 3).unwrap().cz_pairs(1), vec![(0, 1)]);
    }

    #[test]
    fn identity_params_give_cz_only_action() {
        let a = BrickworkAnsatz::new(3, 2).unwrap();
        let psi = random_state(3, 1);
        let out = a.apply(&vec![0.0; a.n_params()], &psi).unwrap();
        let mut want = psi.clone();
        apply_cz(&mut want, 3, 0, 1);
        apply_cz(&mut want, 3, 1, 2);
        assert!(out.iter().zip(&want).all(|(x, y)| (x - y).norm() < 1e-15));
    }

    #[test]
    fn direct_and_materialized_agree() {
        let a = BrickworkAnsatz::new(4, 3).unwrap();
        let p = random_params(&a, 2);
        let psi = random_state(4, 3);
        let direct = a.apply(&p, &psi).unwrap();
        let via = simulate(&a.materialize(&p).unwrap(), psi, None).unwrap();
        let via = match via {
            crate::simulator::SimState::Pure { amps, .. } => amps,
            _ => unreachable!(),
        };
        assert!(direct.iter().zip(&via).all(|(x, y)| (x - y).norm() < 1e-13));
        let norm: f64 = direct.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn loss_examples() {
        let a = BrickworkAnsatz::new(3, 3).unwrap();
        let p = random_params(&a, 4);
        let psi = random_state(3, 5);
        let t = a.apply(&p, &psi).unwrap();
        assert!(a.loss(&p, &t, &psi).unwrap() < 1e-14);
        let neg: Vec<Complex64> = t.iter().map(|z| -z).collect();
        assert!((a.loss(&p, &neg, &psi).unwrap() - 2.0).abs() < 1e-13);
        // a target orthogonal to the ansatz output
        let mut orth: Vec<Complex64> = random_state(3, 6);
        let ov: Complex64 = t.iter().zip(&orth).map(|(x, y)| x.conj() * y).sum();
        orth.iter_mut().zip(&t).for_each(|(o, x)| *o -= ov * x);
        let nrm = orth.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        orth.iter_mut().for_each(|z| *z /= nrm);
        assert!((a.loss(&p, &orth, &psi).unwrap() - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let a = BrickworkAnsatz::new(3, 3).unwrap();
        let psi = random_state(3, 7);
        let t = random_state(3, 8);
        for seed in 0..5 {
            let p = random_params(&a, 100 + seed);
            let (_, g) = a.loss_and_gradient(&p, &t, &psi).unwrap();
            let h = 1e-5;
            for i in 0..p.len() {
                let mut up = p.clone();
                up[i] += h;
                let mut dn = p.clone();
                dn[i] -= h;
                let num = (a.loss_squared(&up, &t, &psi).unwrap() - a.loss_squared(&dn, &t, &psi).unwrap()) / (2.0 * h);
                assert!((num - g[i]).abs() <= 1e-5 * g[i].abs().max(1e-3), "param {i}: {num} vs {}", g[i]);
            }
        }
    }
}
