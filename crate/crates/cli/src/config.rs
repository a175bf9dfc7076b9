//! Experiment configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use statqpe::compiler::CompileOptions;
use statqpe::estimator::experiment::MitigationConfig;
use statqpe::estimator::{CircuitMode, ExperimentSettings, Filter, Sampling};
use statqpe::fourier::{qeea_coefficients, select_beta, select_d, wan_coefficients};
use statqpe::hamiltonian::{basis_state, check_qubit_limit, parse_hamiltonian, select_tau, PauliSum};
use statqpe::simulator::noise::NoiseModel;
use statqpe::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cdf,
    Qeea,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompileConfig {
    #[serde(default = "default_restarts")]
    pub max_restarts: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
}

fn default_restarts() -> usize {
    CompileOptions::default().max_restarts
}
fn default_tol() -> f64 {
    CompileOptions::default().tol
}
fn default_iterations() -> usize {
    CompileOptions::default().max_iterations
}

impl Default for CompileConfig {
    fn default() -> Self {
        Self {
            max_restarts: default_restarts(),
            tol: default_tol(),
            max_iterations: default_iterations(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    /// Range of the written CDF trace.
    #[serde(default = "default_range")]
    pub range: (f64, f64),
    #[serde(default = "default_points")]
    pub grid_points: usize,
    #[serde(default = "default_threshold")]
    pub jump_threshold: f64,
    /// Explicit brackets in units of τλ; found automatically when empty.
    #[serde(default)]
    pub brackets: Vec<(f64, f64)>,
}

fn default_range() -> (f64, f64) {
    (-std::f64::consts::PI, std::f64::consts::PI)
}
fn default_points() -> usize {
    statqpe::estimator::energy::DEFAULT_GRID_POINTS
}
fn default_threshold() -> f64 {
    statqpe::estimator::energy::DEFAULT_JUMP_THRESHOLD
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            range: default_range(),
            grid_points: default_points(),
            jump_threshold: default_threshold(),
            brackets: Vec::new(),
        }
    }
}

fn default_shots() -> u64 {
    100
}
fn default_qubit_limit() -> usize {
    12
}
fn default_qeea_grid() -> usize {
    1 << 16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Hamiltonian file, relative to the config file.
    pub hamiltonian_path: PathBuf,
    /// Computational basis input state, qubit 0 first. Defaults to all zeros.
    #[serde(default)]
    pub psi: Option<String>,
    #[serde(default)]
    pub tau: Option<f64>,
    /// Spectral bound for automatic τ selection.
    #[serde(default)]
    pub tau_bound: Option<f64>,
    pub method: Method,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub d: Option<usize>,
    /// QEEA series length N.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "default_qeea_grid")]
    pub qeea_grid: usize,
    /// QEEA bins cover [−alpha, alpha]; must contain the spectrum of τH.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// N_S; absent means every k once with weight P_k.
    #[serde(default)]
    pub n_samples: Option<usize>,
    #[serde(default = "default_shots")]
    pub shots_per_sample: u64,
    #[serde(default = "default_mode")]
    pub circuit_mode: CircuitMode,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub mitigation: MitigationConfig,
    #[serde(default)]
    pub compile: CompileConfig,
    #[serde(default)]
    pub estimate: EstimateConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_qubit_limit")]
    pub max_qubits: usize,
}

fn default_mode() -> CircuitMode {
    CircuitMode::Exact
}

/// A config with its file location, ready to resolve relative paths.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: ExperimentConfig,
    pub base: PathBuf,
}

pub fn load(path: &Path) -> Result<Loaded, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let config: ExperimentConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    config.validate()?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { config, base })
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        match self.method {
            Method::Cdf => {
                match (self.beta, self.delta) {
                    (Some(_), Some(_)) => return bad("give either beta or (delta, epsilon), not both"),
                    (None, None) => return bad("cdf needs beta or (delta, epsilon)"),
                    (Some(_), None) if self.epsilon.is_some() => {
                        return bad("give either beta or (delta, epsilon), not both")
                    }
                    (Some(_), None) if self.d.is_none() => return bad("beta needs an explicit d"),
                    (None, Some(_)) if self.epsilon.is_none() => return bad("delta needs epsilon"),
                    _ => {}
                }
                if self.n.is_some() || self.alpha.is_some() {
                    return bad("n and alpha belong to the qeea method");
                }
            }
            Method::Qeea => {
                if self.beta.is_some() || self.delta.is_some() || self.d.is_some() {
                    return bad("qeea takes epsilon and n only");
                }
                if self.epsilon.is_none() || self.n.is_none() {
                    return bad("qeea needs epsilon and n");
                }
            }
        }
        if self.tau.is_some() == self.tau_bound.is_some() {
            return bad("give exactly one of tau and tau_bound");
        }
        self.settings(0).validate()
    }

    pub fn hamiltonian(&self, base: &Path) -> Result<PauliSum, Error> {
        let path = base.join(&self.hamiltonian_path);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        let h = parse_hamiltonian(&text)?;
        check_qubit_limit(h.n_qubits(), self.max_qubits)?;
        Ok(h)
    }

    /// Input bit string, checked against the register size.
    pub fn psi_bits(&self, n_qubits: usize) -> Result<String, Error> {
        let bits = self.psi.clone().unwrap_or_else(|| "0".repeat(n_qubits));
        if bits.len() != n_qubits {
            return Err(Error::InvalidArgument(format!(
                "psi has {} bits, the Hamiltonian acts on {n_qubits} qubits",
                bits.len()
            )));
        }
        basis_state(&bits)?;
        Ok(bits)
    }

    pub fn tau(&self, h: &PauliSum) -> Result<f64, Error> {
        match (self.tau, self.tau_bound) {
            (Some(t), None) => Ok(t),
            (None, Some(b)) => select_tau(h, b),
            _ => Err(Error::InvalidArgument("give exactly one of tau and tau_bound".into())),
        }
    }

    pub fn filter(&self) -> Result<Filter, Error> {
        match self.method {
            Method::Cdf => {
                let spec = match (self.beta, self.delta, self.epsilon) {
                    (Some(beta), _, _) => wan_coefficients(beta, self.d.expect("validated"))?,
                    (None, Some(delta), Some(eps)) => {
                        let beta = select_beta(delta, eps)?;
                        match self.d {
                            Some(d) => wan_coefficients(beta, d)?,
                            None => select_d(beta, eps, delta)?.spec,
                        }
                    }
                    _ => unreachable!("validated"),
                };
                Ok(Filter::Cdf(spec))
            }
            Method::Qeea => {
                let spec = qeea_coefficients(self.epsilon.expect("validated"), self.n.expect("validated"), self.qeea_grid)?;
                Ok(Filter::Qeea(match self.alpha {
                    Some(a) => spec.with_alpha(a)?,
                    None => spec,
                }))
            }
        }
    }

    pub fn settings(&self, seed: u64) -> ExperimentSettings {
        let sampling = match self.n_samples {
            Some(n_samples) => Sampling::Importance { n_samples },
            None => Sampling::FullSums,
        };
        let mut st = ExperimentSettings::new(self.circuit_mode, sampling);
        st.noise = self.noise.clone();
        st.mitigation = self.mitigation.clone();
        st.shots_per_basis = self.shots_per_sample;
        st.seed = seed;
        st.compile = CompileOptions {
            max_restarts: self.compile.max_restarts,
            tol: self.compile.tol,
            seed,
            max_iterations: self.compile.max_iterations,
        };
        st
    }
}
