//! Readout calibration matrices and their inversion.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::simulator::measure::{measure_qubits, ShotResult};
use crate::simulator::noise::ReadoutError;
use crate::simulator::state::SimState;

/// Calibration matrices above this condition number are rejected.
pub const MAX_CONDITION: f64 = 1e6;
/// Largest register calibrated in full.
pub const MAX_CALIBRATION_QUBITS: usize = 4;

/// A_{ij} = P(read i | prepared j); columns sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationMatrix {
    pub n_qubits: usize,
    pub a: DMatrix<f64>,
    pub shots_per_state: u64,
}

impl CalibrationMatrix {
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            a: DMatrix::identity(1 << n_qubits, 1 << n_qubits),
            shots_per_state: 0,
        }
    }

    pub fn condition_number(&self) -> f64 {
        let sv = self.a.clone().svd(false, false).singular_values;
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// Closed-form tensor-product calibration for independent readout errors.
pub fn exact_calibration(readout: &[ReadoutError], bitflip_average: bool) -> CalibrationMatrix {
    let n = readout.len();
    let dim = 1usize << n;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            let mut p = 1.0;
            for (q, r) in readout.iter().enumerate() {
                let shift = n - 1 - q;
                let prepared = (j >> shift) & 1 == 1;
                let read = (i >> shift) & 1 == 1;
                let one = if bitflip_average {
                    0.5 * (r.p_read_one(prepared) + 1.0 - r.p_read_one(!prepared))
                } else {
                    r.p_read_one(prepared)
                };
                p *= if read { one } else { 1.0 - one };
            }
            a[(i, j)] = p;
        }
    }
    CalibrationMatrix {
        n_qubits: n,
        a,
        shots_per_state: 0,
    }
}

/// Prepares every basis state, measures it with readout noise and
/// normalizes the counts into columns.
pub fn estimate_calibration<R: Rng>(
    readout: &[ReadoutError],
    shots_per_state: u64,
    bitflip_average: bool,
    rng: &mut R,
) -> Result<CalibrationMatrix> {
    let n = readout.len();
    if n == 0 {
        return Err(Error::InvalidArgument("calibration needs at least one qubit".into()));
    }
    if n > MAX_CALIBRATION_QUBITS {
        return Err(Error::Capacity {
            what: "calibrated qubits",
            value: n,
            limit: MAX_CALIBRATION_QUBITS,
        });
    }
    if shots_per_state == 0 {
        return Err(Error::InvalidArgument("shots_per_state must be positive".into()));
    }
    let dim = 1usize << n;
    let qubits: Vec<usize> = (0..n).collect();
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..dim {
        let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); dim];
        amps[j] = num_complex::Complex64::new(1.0, 0.0);
        let state = SimState::pure(amps)?;
        let counts = measure_qubits(&state, &qubits, readout, shots_per_state, bitflip_average, rng)?;
        for i in 0..dim {
            a[(i, j)] = counts.counts[i] as f64 / shots_per_state as f64;
        }
    }
    Ok(CalibrationMatrix {
        n_qubits: n,
        a,
        shots_per_state,
    })
}

/// A⁻¹ · counts; entries may be negative and are not clipped.
pub fn apply_readout_mitigation(counts: &ShotResult, cal: &CalibrationMatrix) -> Result<Vec<f64>> {
    if counts.n_bits != cal.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: cal.n_qubits,
            got: counts.n_bits,
        });
    }
    let v: Vec<f64> = counts.counts.iter().map(|c| *c as f64).collect();
    mitigate_vector(&v, cal)
}

pub fn mitigate_vector(v: &[f64], cal: &CalibrationMatrix) -> Result<Vec<f64>> {
    let cond = cal.condition_number();
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned(cond));
    }
    let sol = cal
        .a
        .clone()
        .lu()
        .solve(&DVector::from_column_slice(v))
        .ok_or(Error::IllConditioned(f64::INFINITY))?;
    Ok(sol.iter().cloned().collect())
}

/// Mitigated ⟨Z⟩ of a one-bit record: (x₀ − x₁) / shots.
pub fn mitigated_z(counts: &ShotResult, cal: &CalibrationMatrix) -> Result<f64> {
    if counts.n_bits != 1 {
        return Err(Error::InvalidArgument("mitigated_z needs a one-bit record".into()));
    }
    let x = apply_readout_mitigation(counts, cal)?;
    Ok((x[0] - x[1]) / counts.shots as f64)
}
