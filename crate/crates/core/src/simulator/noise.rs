//! Noise model: per-CZ coherent ZZ over-rotation and two-qubit
//! depolarizing, plus per-qubit readout confusion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Readout confusion of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutError {
    /// P(read 1 | state 0).
    pub p01: f64,
    /// P(read 0 | state 1).
    pub p10: f64,
}

impl ReadoutError {
    pub fn new(p01: f64, p10: f64) -> Result<Self> {
        let r = Self { p01, p10 };
        r.validate()?;
        Ok(r)
    }

    pub fn symmetric(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p01", self.p01), ("p10", self.p10)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Noise(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn is_perfect(&self) -> bool {
        self.p01 == 0.0 && self.p10 == 0.0
    }

    /// Probability of recording 1 when the physical bit is `bit`.
    pub fn p_read_one(&self, bit: bool) -> f64 {
        if bit {
            1.0 - self.p10
        } else {
            self.p01
        }
    }

    /// Expected recorded ⟨Z⟩ given the true ⟨Z⟩ = z.
    pub fn expected_z(&self, z: f64, bitflip_average: bool) -> f64 {
        let scale = 1.0 - self.p01 - self.p10;
        if bitflip_average {
            z * scale
        } else {
            z * scale + (self.p10 - self.p01)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    /// Two-qubit depolarizing probability applied after every CZ gate.
    #[serde(default)]
    pub depolarizing_p: f64,
    /// Angle θ of e^{−i(θ/2) Z⊗Z} applied after every CZ gate.
    #[serde(default)]
    pub coherent_zz_theta: f64,
    /// Per-qubit readout errors; missing entries mean perfect readout.
    #[serde(default)]
    pub readout: Vec<ReadoutError>,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn depolarizing(p: f64) -> Self {
        Self {
            depolarizing_p: p,
            ..Self::default()
        }
    }

    pub fn coherent(theta: f64) -> Self {
        Self {
            coherent_zz_theta: theta,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.depolarizing_p) {
            return Err(Error::Noise(format!(
                "depolarizing_p = {} outside [0, 1]",
                self.depolarizing_p
            )));
        }
        if !self.coherent_zz_theta.is_finite() {
            return Err(Error::Noise("non-finite coherent angle".into()));
        }
        for r in &self.readout {
            r.validate()?;
        }
        Ok(())
    }

    pub fn needs_density(&self) -> bool {
        self.depolarizing_p > 0.0
    }

    pub fn readout_for(&self, qubit: usize) -> ReadoutError {
        self.readout.get(qubit).copied().unwrap_or_default()
    }

    pub fn without_readout(&self) -> Self {
        Self {
            readout: Vec::new(),
            ..self.clone()
        }
    }
}
