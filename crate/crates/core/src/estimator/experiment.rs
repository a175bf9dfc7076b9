//! Sampled Hadamard-test experiments.
//!
//! Every sample index i owns its own random streams (twirl, shots), so the
//! output does not depend on how samples are spread over threads.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{draw_samples, expand_samples};
use super::{AggregatedSamples, Filter, SampleRecord};
use crate::compiler::{compile, CompileOptions};
use crate::error::{Error, Result};
use crate::hamiltonian::{check_normalized, eigh, to_dense, Pauli, PauliSum};
use crate::mitigation::readout::{estimate_calibration, exact_calibration, mitigate_vector, CalibrationMatrix};
use crate::mitigation::zne::ZneOptions;
use crate::mitigation::{fold_to_lambda, twirl};
use crate::rng::{derive_seed, stream, Purpose};
use crate::simulator::circuit::LayeredCircuit;
use crate::simulator::hadamard::{controlled, hadamard_expectations, hadamard_final_states, plus_input, ControlledOp};
use crate::simulator::measure::measure_qubits;
use crate::simulator::noise::NoiseModel;
use crate::simulator::trotter::trotter_circuit;

/// How the controlled e^{−iτHk} is realised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CircuitMode {
    /// Dense controlled unitary; only readout noise applies.
    Exact,
    /// Brickwork ansatz with `depth` CZ layers, compiled per k.
    Compiled { depth: usize },
    /// First-order Trotter steps for H = c₁Z + c₂X, `steps_per_k` per power of U.
    Trotter {
        #[serde(default = "one")]
        steps_per_k: usize,
    },
}

fn one() -> usize {
    1
}

fn default_lambdas() -> Vec<usize> {
    vec![1]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MitigationConfig {
    /// One Pauli twirl per sample, shared by all noise scales.
    #[serde(default)]
    pub twirl: bool,
    /// Odd, strictly increasing noise scales; three or more enable ZNE.
    #[serde(default = "default_lambdas")]
    pub zne_lambdas: Vec<usize>,
    #[serde(default)]
    pub zne_weighted: bool,
    /// Invert the ancilla calibration matrix.
    #[serde(default)]
    pub readout: bool,
    #[serde(default)]
    pub bitflip_average: bool,
    /// Shots per basis state when estimating the calibration; 0 uses the
    /// exact matrix of the noise model.
    #[serde(default)]
    pub calibration_shots: u64,
}

impl Default for MitigationConfig {
    fn default() -> Self {
        Self {
            twirl: false,
            zne_lambdas: default_lambdas(),
            zne_weighted: false,
            readout: false,
            bitflip_average: false,
            calibration_shots: 0,
        }
    }
}

impl MitigationConfig {
    pub fn validate(&self) -> Result<()> {
        let l = &self.zne_lambdas;
        if l.is_empty() || l.iter().any(|&x| x == 0 || x % 2 == 0) || l.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "zne_lambdas must be odd and strictly increasing, got {l:?}"
            )));
        }
        if l.len() == 2 {
            return Err(Error::InvalidArgument("extrapolation needs at least three noise scales".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// N_S i.i.d. draws from P_k.
    Importance { n_samples: usize },
    /// Every k once, weighted by P_k instead of n_k/N_S.
    FullSums,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSettings {
    pub mode: CircuitMode,
    pub sampling: Sampling,
    pub noise: NoiseModel,
    pub mitigation: MitigationConfig,
    /// Shots per Hadamard basis; 0 records exact expectation values.
    pub shots_per_basis: u64,
    pub seed: u64,
    pub compile: CompileOptions,
}

impl ExperimentSettings {
    pub fn new(mode: CircuitMode, sampling: Sampling) -> Self {
        Self {
            mode,
            sampling,
            noise: NoiseModel::noiseless(),
            mitigation: MitigationConfig::default(),
            shots_per_basis: 100,
            seed: 0,
            compile: CompileOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        self.mitigation.validate()?;
        if self.mitigation.bitflip_average && self.shots_per_basis % 2 == 1 {
            return Err(Error::InvalidArgument("bit-flip averaging needs an even shot count".into()));
        }
        if let Sampling::Importance { n_samples: 0 } = self.sampling {
            return Err(Error::InvalidArgument("N_S must be at least 1".into()));
        }
        match self.mode {
            CircuitMode::Exact => {
                if self.mitigation.twirl || self.mitigation.zne_lambdas != [1] {
                    return Err(Error::InvalidArgument(
                        "exact mode has no gates to twirl or fold".into(),
                    ));
                }
                if self.noise.depolarizing_p != 0.0 || self.noise.coherent_zz_theta != 0.0 {
                    return Err(Error::InvalidArgument(
                        "gate noise needs a circuit mode (compiled or trotter)".into(),
                    ));
                }
            }
            CircuitMode::Compiled { depth: 0 } => {
                return Err(Error::InvalidArgument("compiled depth must be ≥ 1".into()));
            }
            CircuitMode::Trotter { steps_per_k: 0 } => {
                return Err(Error::InvalidArgument("steps_per_k must be ≥ 1".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub index: usize,
    pub k: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileSummary {
    pub k: u64,
    pub loss: f64,
    pub converged: bool,
    pub restarts_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub samples: Vec<SampleRecord>,
    pub failures: Vec<SampleFailure>,
    pub aggregated: AggregatedSamples,
    /// Largest CZ depth of an unfolded controlled circuit.
    pub max_cz_depth: usize,
    pub compile: Vec<CompileSummary>,
    pub calibration: Option<CalibrationMatrix>,
}

/// Powers of a Hamiltonian's evolution from one diagonalization.
struct Propagator {
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
    tau: f64,
}

impl Propagator {
    fn new(h: &PauliSum, tau: f64) -> Result<Self> {
        let (values, vectors) = eigh(&to_dense(h)?);
        Ok(Self { values, vectors, tau })
    }

    fn controlled_power(&self, k: u64) -> DMatrix<Complex64> {
        let mut scaled = self.vectors.clone();
        for (j, l) in self.values.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, -self.tau * l * k as f64);
            for v in scaled.column_mut(j).iter_mut() {
                *v *= ph;
            }
        }
        controlled(&(scaled * self.vectors.adjoint()))
    }
}

/// (c₁, c₂) of a one-qubit H = c₁Z + c₂X (+ shift).
pub fn trotter_coefficients(h: &PauliSum) -> Result<(f64, f64)> {
    if h.n_qubits() != 1 {
        return Err(Error::InvalidArgument(format!(
            "Trotter mode supports one data qubit, got {}",
            h.n_qubits()
        )));
    }
    let (mut c1, mut c2) = (0.0, 0.0);
    for (c, s) in h.terms() {
        match s.letters()[0] {
            Pauli::Z => c1 = *c,
            Pauli::X => c2 = *c,
            p => {
                return Err(Error::InvalidArgument(format!(
                    "Trotter mode supports Z and X terms only, found {}",
                    p.as_char()
                )))
            }
        }
    }
    Ok((c1, c2))
}

enum Source {
    Exact(Propagator),
    Circuits(BTreeMap<u64, std::result::Result<LayeredCircuit, String>>),
    Trotter { c1: f64, c2: f64, steps: usize },
}

impl Source {
    fn circuit(&self, k: u64, tau: f64) -> Result<LayeredCircuit> {
        match self {
            Source::Circuits(map) => match map.get(&k) {
                Some(Ok(c)) => Ok(c.clone()),
                Some(Err(m)) => Err(Error::Numerical(m.clone())),
                None => Err(Error::Circuit(format!("no circuit for k = {k}"))),
            },
            Source::Trotter { c1, c2, steps } => {
                trotter_circuit(*c1, *c2, tau / *steps as f64, k as usize * steps)
            }
            Source::Exact(_) => unreachable!("exact mode has no circuits"),
        }
    }
}

/// Runs the Hadamard tests for every sampled k and aggregates them.
pub fn run_experiment(
    h: &PauliSum,
    psi: &[Complex64],
    tau: f64,
    filter: &Filter,
    settings: &ExperimentSettings,
) -> Result<ExperimentOutput> {
    settings.validate()?;
    if psi.len() != 1usize << h.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << h.n_qubits(),
            got: psi.len(),
        });
    }
    check_normalized(psi)?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    let dist = filter.importance()?;
    let seed = settings.seed;
    let ks: Vec<u64> = match settings.sampling {
        Sampling::Importance { n_samples } => {
            let counts = draw_samples(&dist, n_samples, &mut stream(seed, 0, Purpose::KDraw))?;
            expand_samples(&dist, &counts)
        }
        Sampling::FullSums => dist.ks.clone(),
    };

    let mut compile_summaries = Vec::new();
    let source = match settings.mode {
        CircuitMode::Exact => Source::Exact(Propagator::new(h, tau)?),
        CircuitMode::Trotter { steps_per_k } => {
            let (c1, c2) = trotter_coefficients(h)?;
            Source::Trotter { c1, c2, steps: steps_per_k }
        }
        CircuitMode::Compiled { depth } => {
            let prop = Propagator::new(h, tau)?;
            let input = plus_input(psi);
            let mut distinct = ks.clone();
            distinct.dedup();
            let results: Vec<(u64, Result<crate::compiler::CompilationResult>)> = distinct
                .par_iter()
                .map(|&k| {
                    let opts = CompileOptions {
                        seed: derive_seed(seed, k, Purpose::CompileRestart),
                        ..settings.compile
                    };
                    (k, compile(&prop.controlled_power(k), &input, depth, &opts))
                })
                .collect();
            let mut map = BTreeMap::new();
            for (k, r) in results {
                let entry = match r {
                    Ok(c) => {
                        compile_summaries.push(CompileSummary {
                            k,
                            loss: c.final_loss,
                            converged: c.converged,
                            restarts_used: c.restarts_used,
                        });
                        if c.converged {
                            c.ansatz.materialize(&c.params).map_err(|e| e.to_string())
                        } else {
                            Err(format!("compilation of k = {k} stopped at loss {:.3e}", c.final_loss))
                        }
                    }
                    Err(e) => Err(e.to_string()),
                };
                map.insert(k, entry);
            }
            Source::Circuits(map)
        }
    };

    let ro = settings.noise.readout_for(0);
    let bitflip = settings.mitigation.bitflip_average;
    let calibration = if settings.mitigation.readout {
        let cal = if settings.shots_per_basis == 0 || settings.mitigation.calibration_shots == 0 {
            exact_calibration(&[ro], bitflip)
        } else {
            estimate_calibration(
                &[ro],
                settings.mitigation.calibration_shots,
                bitflip,
                &mut stream(seed, 0, Purpose::Calibration),
            )?
        };
        // fail early rather than once per sample
        mitigate_vector(&[0.5, 0.5], &cal)?;
        Some(cal)
    } else {
        None
    };

    let results: Vec<Result<(SampleRecord, usize)>> = ks
        .par_iter()
        .enumerate()
        .map(|(i, &k)| run_sample(i, k, psi, tau, &source, settings, calibration.as_ref()))
        .collect();

    let mut samples = Vec::with_capacity(ks.len());
    let mut failures = Vec::new();
    let mut max_cz_depth = 0;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((rec, depth)) => {
                max_cz_depth = max_cz_depth.max(depth);
                samples.push(rec);
            }
            Err(e) => failures.push(SampleFailure {
                index: i,
                k: ks[i],
                message: e.to_string(),
            }),
        }
    }
    let zne = ZneOptions {
        inverse_variance: settings.mitigation.zne_weighted,
    };
    let aggregated = match settings.sampling {
        Sampling::FullSums => full_sum_aggregate(&samples, &dist, filter, tau, settings, &zne)?,
        Sampling::Importance { .. } => AggregatedSamples::from_records(
            &samples,
            &dist,
            filter.kind(),
            tau,
            &settings.mitigation.zne_lambdas,
            &zne,
        )?,
    };
    Ok(ExperimentOutput {
        samples,
        failures,
        aggregated,
        max_cz_depth,
        compile: compile_summaries,
        calibration,
    })
}

/// Full sums need every k; a failed k makes the sum meaningless.
fn full_sum_aggregate(
    samples: &[SampleRecord],
    dist: &crate::fourier::ImportanceDistribution,
    filter: &Filter,
    tau: f64,
    settings: &ExperimentSettings,
    zne: &ZneOptions,
) -> Result<AggregatedSamples> {
    if samples.len() != dist.len() {
        return Err(Error::InsufficientData(format!(
            "full sums need all {} indices, {} succeeded",
            dist.len(),
            samples.len()
        )));
    }
    let mut agg = AggregatedSamples::from_records(
        samples,
        dist,
        filter.kind(),
        tau,
        &settings.mitigation.zne_lambdas,
        zne,
    )?;
    for (e, p) in agg.entries.iter_mut().zip(&dist.probabilities) {
        e.n_k = *p;
    }
    agg.n_samples = 1.0;
    Ok(agg)
}

#[allow(clippy::too_many_arguments)]
fn run_sample(
    index: usize,
    k: u64,
    psi: &[Complex64],
    tau: f64,
    source: &Source,
    settings: &ExperimentSettings,
    calibration: Option<&CalibrationMatrix>,
) -> Result<(SampleRecord, usize)> {
    let seed = settings.seed;
    let shots = settings.shots_per_basis;
    let bitflip = settings.mitigation.bitflip_average;
    let noise = &settings.noise;
    let mut shot_rng = stream(seed, index as u64, Purpose::Shots);
    let ro = noise.readout_for(0);
    let mut record = |op: ControlledOp<'_>| -> Result<[f64; 2]> {
        let z = if shots == 0 {
            hadamard_expectations(op, psi, Some(noise), bitflip)?
        } else {
            let states = hadamard_final_states(op, psi, Some(noise))?;
            let mut z = [0.0; 2];
            for (b, st) in states.iter().enumerate() {
                z[b] = measure_qubits(st, &[0], &[ro], shots, bitflip, &mut shot_rng)?.z_mean()?;
            }
            z
        };
        match calibration {
            Some(cal) => {
                let mut out = [0.0; 2];
                for b in 0..2 {
                    let x = mitigate_vector(&[(1.0 + z[b]) / 2.0, (1.0 - z[b]) / 2.0], cal)?;
                    out[b] = x[0] - x[1];
                }
                Ok(out)
            }
            None => Ok(z),
        }
    };

    let mut r = Vec::with_capacity(settings.mitigation.zne_lambdas.len());
    let mut s = Vec::with_capacity(r.capacity());
    let (twirl_seed, depth) = match source {
        Source::Exact(prop) => {
            let u = prop.controlled_power(k);
            let z = record(ControlledOp::Unitary(&u))?;
            r.push(z[0]);
            s.push(z[1]);
            (None, 0)
        }
        _ => {
            let mut base = source.circuit(k, tau)?;
            let depth = base.cz_layer_count();
            let twirl_seed = if settings.mitigation.twirl {
                let ts = derive_seed(seed, index as u64, Purpose::Twirl);
                base = twirl(&base, &mut stream(seed, index as u64, Purpose::Twirl))?.merged;
                Some(ts)
            } else {
                None
            };
            for &lambda in &settings.mitigation.zne_lambdas {
                let folded = fold_to_lambda(&base, lambda)?;
                let z = record(ControlledOp::Circuit(&folded.circuit))?;
                r.push(z[0]);
                s.push(z[1]);
            }
            (twirl_seed, depth)
        }
    };
    Ok((
        SampleRecord {
            k,
            twirl_seed,
            r,
            s,
            shots_per_basis: shots,
        },
        depth,
    ))
}
