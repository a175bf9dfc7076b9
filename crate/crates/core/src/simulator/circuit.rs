//! Layered circuits: single-qubit U3 layers alternating with CZ layers.

use serde::{Deserialize, Serialize};

use super::gates::{self, Euler, Mat2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GateLayer {
    /// One Euler triple per qubit.
    SingleQubit(Vec<Euler>),
    /// Disjoint CZ pairs.
    EntanglingCz(Vec<(usize, usize)>),
}

impl GateLayer {
    pub fn identity(n_qubits: usize) -> Self {
        GateLayer::SingleQubit(vec![Euler::IDENTITY; n_qubits])
    }

    pub fn is_cz(&self) -> bool {
        matches!(self, GateLayer::EntanglingCz(_))
    }

    /// Single-qubit layer with `u` on `qubit` and identity elsewhere.
    pub fn single_on(n_qubits: usize, qubit: usize, u: &Mat2) -> Self {
        let mut triples = vec![Euler::IDENTITY; n_qubits];
        triples[qubit] = Euler::from_matrix(u);
        GateLayer::SingleQubit(triples)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredCircuit {
    n_qubits: usize,
    layers: Vec<GateLayer>,
    ancilla: usize,
}

impl LayeredCircuit {
    pub fn new(n_qubits: usize, layers: Vec<GateLayer>, ancilla: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Circuit("circuit needs at least one qubit".into()));
        }
        if ancilla >= n_qubits {
            return Err(Error::Circuit(format!("ancilla {ancilla} out of range")));
        }
        for (i, layer) in layers.iter().enumerate() {
            match layer {
                GateLayer::SingleQubit(t) => {
                    if t.len() != n_qubits {
                        return Err(Error::Circuit(format!(
                            "layer {i} has {} triples for {n_qubits} qubits",
                            t.len()
                        )));
                    }
                    if t.iter().any(|e| !(e.theta.is_finite() && e.phi.is_finite() && e.lambda.is_finite())) {
                        return Err(Error::Circuit(format!("layer {i} has non-finite angles")));
                    }
                }
                GateLayer::EntanglingCz(pairs) => {
                    let mut used = vec![false; n_qubits];
                    for &(a, b) in pairs {
                        if a >= n_qubits || b >= n_qubits || a == b {
                            return Err(Error::Circuit(format!("layer {i} has bad pair ({a}, {b})")));
                        }
                        if used[a] || used[b] {
                            return Err(Error::Circuit(format!("layer {i} pairs overlap")));
                        }
                        used[a] = true;
                        used[b] = true;
                    }
                }
            }
        }
        Ok(Self {
            n_qubits,
            layers,
            ancilla,
        })
    }

    pub fn empty(n_qubits: usize, ancilla: usize) -> Result<Self> {
        Self::new(n_qubits, Vec::new(), ancilla)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ancilla(&self) -> usize {
        self.ancilla
    }

    pub fn layers(&self) -> &[GateLayer] {
        &self.layers
    }

    pub fn cz_layer_count(&self) -> usize {
        self.layers.iter().filter(|l| l.is_cz()).count()
    }

    pub fn cz_gate_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| match l {
                GateLayer::EntanglingCz(p) => p.len(),
                _ => 0,
            })
            .sum()
    }

    /// True when layers alternate single, CZ, single, ..., single.
    pub fn is_canonical(&self) -> bool {
        if self.layers.is_empty() || self.layers.len() % 2 == 0 {
            return false;
        }
        self.layers
            .iter()
            .enumerate()
            .all(|(i, l)| l.is_cz() == (i % 2 == 1))
    }

    /// Merges adjacent single-qubit layers and pads with identity layers so
    /// every CZ layer sits between exactly one single-qubit layer on each side.
    pub fn canonicalize(&self) -> Self {
        let n = self.n_qubits;
        let mut out: Vec<GateLayer> = Vec::with_capacity(self.layers.len() + 2);
        let mut pending: Option<Vec<Mat2>> = None;
        for layer in &self.layers {
            match layer {
                GateLayer::SingleQubit(t) => {
                    let mats: Vec<Mat2> = t.iter().map(Euler::matrix).collect();
                    pending = Some(match pending {
                        None => mats,
                        Some(prev) => prev
                            .iter()
                            .zip(&mats)
                            .map(|(p, m)| gates::mul(m, p))
                            .collect(),
                    });
                }
                GateLayer::EntanglingCz(pairs) => {
                    out.push(single_from(pending.take(), n));
                    out.push(GateLayer::EntanglingCz(pairs.clone()));
                }
            }
        }
        out.push(single_from(pending.take(), n));
        Self {
            n_qubits: n,
            layers: out,
            ancilla: self.ancilla,
        }
    }

    /// Appends another circuit's layers (same width and ancilla).
    pub fn then(&self, other: &LayeredCircuit) -> Result<Self> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        let mut layers = self.layers.clone();
        layers.extend(other.layers.iter().cloned());
        Self::new(self.n_qubits, layers, self.ancilla)
    }

    pub fn push(&mut self, layer: GateLayer) -> Result<()> {
        let mut layers = std::mem::take(&mut self.layers);
        layers.push(layer);
        *self = Self::new(self.n_qubits, layers, self.ancilla)?;
        Ok(())
    }

    /// Text listing of layers: angles to 6 decimals and CZ pairs.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "circuit qubits={} ancilla={} layers={} cz_layers={}\n",
            self.n_qubits,
            self.ancilla,
            self.layers.len(),
            self.cz_layer_count()
        );
        for (i, layer) in self.layers.iter().enumerate() {
            match layer {
                GateLayer::SingleQubit(t) => {
                    out.push_str(&format!("{i:4} U3"));
                    for (q, e) in t.iter().enumerate() {
                        out.push_str(&format!(
                            " q{q}({:.6},{:.6},{:.6})",
                            e.theta, e.phi, e.lambda
                        ));
                    }
                }
                GateLayer::EntanglingCz(pairs) => {
                    out.push_str(&format!("{i:4} CZ"));
                    for (a, b) in pairs {
                        out.push_str(&format!(" ({a},{b})"));
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

fn single_from(mats: Option<Vec<Mat2>>, n: usize) -> GateLayer {
    match mats {
        None => GateLayer::identity(n),
        Some(m) => GateLayer::SingleQubit(m.iter().map(Euler::from_matrix).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(LayeredCircuit::new(2, vec![GateLayer::EntanglingCz(vec![(0, 2)])], 0).is_err());
        assert!(LayeredCircuit::new(3, vec![GateLayer::EntanglingCz(vec![(0, 1), (1, 2)])], 0).is_err());
        assert!(LayeredCircuit::new(2, vec![GateLayer::identity(3)], 0).is_err());
        assert!(LayeredCircuit::new(2, vec![], 2).is_err());
    }

    #[test]
    fn canonicalize_inserts_and_merges() {
        let cz = GateLayer::EntanglingCz(vec![(0, 1)]);
        let h = GateLayer::single_on(2, 0, &gates::hadamard());
        let c = LayeredCircuit::new(2, vec![cz.clone(), cz.clone(), h.clone(), h], 0).unwrap();
        let k = c.canonicalize();
        assert!(k.is_canonical());
        assert_eq!(k.layers().len(), 5);
        assert_eq!(k.cz_layer_count(), 2);
        if let GateLayer::SingleQubit(t) = &k.layers()[4] {
            assert!(t[0].is_identity());
        } else {
            panic!("expected single-qubit layer");
        }
    }

    #[test]
    fn dump_format() {
        let c = LayeredCircuit::new(
            2,
            vec![
                GateLayer::SingleQubit(vec![Euler::new(1.0, 0.5, -0.25), Euler::IDENTITY]),
                GateLayer::EntanglingCz(vec![(0, 1)]),
            ],
            0,
        )
        .unwrap();
        let text = c.dump();
        assert_eq!(
            text,
            "circuit qubits=2 ancilla=0 layers=2 cz_layers=1\n\
             \x20  0 U3 q0(1.000000,0.500000,-0.250000) q1(0.000000,0.000000,0.000000)\n\
             \x20  1 CZ (0,1)\n"
        );
    }
}
