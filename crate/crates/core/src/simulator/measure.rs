//! Shot sampling with readout confusion and bit-flip averaging.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::noise::ReadoutError;
use super::state::SimState;
use crate::error::{Error, Result};

/// Counts indexed by measured register value (first listed qubit is the
/// most significant bit).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotResult {
    pub n_bits: usize,
    pub counts: Vec<u64>,
    pub shots: u64,
}

impl ShotResult {
    pub fn new(n_bits: usize) -> Self {
        Self {
            n_bits,
            counts: vec![0; 1 << n_bits],
            shots: 0,
        }
    }

    pub fn record(&mut self, outcome: usize) {
        self.counts[outcome] += 1;
        self.shots += 1;
    }

    pub fn merge(&mut self, other: &ShotResult) -> Result<()> {
        if other.n_bits != self.n_bits {
            return Err(Error::DimensionMismatch {
                expected: self.n_bits,
                got: other.n_bits,
            });
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.shots += other.shots;
        Ok(())
    }

    pub fn bitstring(&self, index: usize) -> String {
        (0..self.n_bits)
            .map(|b| if index >> (self.n_bits - 1 - b) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn to_map(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(i, c)| (self.bitstring(i), *c))
            .collect()
    }

    /// (count(0) − count(1)) / shots for a single-bit record.
    pub fn z_mean(&self) -> Result<f64> {
        if self.n_bits != 1 {
            return Err(Error::InvalidArgument("z_mean needs a one-bit record".into()));
        }
        if self.shots == 0 {
            return Err(Error::InsufficientData("no shots".into()));
        }
        Ok((self.counts[0] as f64 - self.counts[1] as f64) / self.shots as f64)
    }
}

/// Marginal distribution of `qubits` (in the given order) from full-register probabilities.
pub fn marginal_probabilities(probs: &[f64], n: usize, qubits: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; 1 << qubits.len()];
    for (i, p) in probs.iter().enumerate() {
        let mut idx = 0usize;
        for &q in qubits {
            idx = (idx << 1) | ((i >> (n - 1 - q)) & 1);
        }
        out[idx] += p;
    }
    out
}

/// Samples `shots` readouts of `qubits`.
///
/// Each physical bit passes through its own confusion channel; `readout[i]`
/// belongs to `qubits[i]`. With `bitflip_average`, the second half of the
/// shots flip every measured qubit before readout and flip the record back.
pub fn measure_qubits<R: Rng>(
    state: &SimState,
    qubits: &[usize],
    readout: &[ReadoutError],
    shots: u64,
    bitflip_average: bool,
    rng: &mut R,
) -> Result<ShotResult> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    if bitflip_average && shots % 2 == 1 {
        return Err(Error::InvalidArgument(
            "bit-flip averaging needs an even shot count".into(),
        ));
    }
    if readout.len() != qubits.len() {
        return Err(Error::DimensionMismatch {
            expected: qubits.len(),
            got: readout.len(),
        });
    }
    let n = state.n_qubits();
    if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
        return Err(Error::InvalidArgument(format!("qubit {q} out of range")));
    }
    let probs: Vec<f64> = marginal_probabilities(&state.probabilities(), n, qubits)
        .into_iter()
        .map(|p| p.max(0.0))
        .collect();
    let sampler = WeightedIndex::new(&probs)
        .map_err(|e| Error::Numerical(format!("bad outcome distribution: {e}")))?;
    let m = qubits.len();
    let all = (1usize << m) - 1;
    let mut result = ShotResult::new(m);
    for shot in 0..shots {
        let flip = bitflip_average && shot >= shots / 2;
        let logical = sampler.sample(rng);
        let physical = if flip { logical ^ all } else { logical };
        let mut read = 0usize;
        for (i, r) in readout.iter().enumerate() {
            let bit = physical >> (m - 1 - i) & 1 == 1;
            let one = rng.gen::<f64>() < r.p_read_one(bit);
            read = (read << 1) | one as usize;
        }
        result.record(if flip { read ^ all } else { read });
    }
    Ok(result)
}

/// Samples all qubits of the register.
pub fn measure_shots<R: Rng>(
    state: &SimState,
    readout: &[ReadoutError],
    shots: u64,
    rng: &mut R,
    bitflip_average: bool,
) -> Result<ShotResult> {
    let qubits: Vec<usize> = (0..state.n_qubits()).collect();
    let mut full = readout.to_vec();
    full.resize(qubits.len(), ReadoutError::default());
    measure_qubits(state, &qubits, &full, shots, bitflip_average, rng)
}
