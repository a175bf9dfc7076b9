//! Variational compilation of a target state map into a brickwork ansatz.
//!
//! The loss is the phase-sensitive distance L(p) = ‖U|Ψ⟩ − Ũ(p)|Ψ⟩‖₂.
//! Optimization runs BFGS on L², whose gradient comes from an adjoint sweep.

pub mod ansatz;
pub mod bfgs;
pub mod cache;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use ansatz::BrickworkAnsatz;
pub use bfgs::{BfgsOptions, BfgsResult, Termination};
pub use cache::{target_hash, CacheEntry, CompileCache};

use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompileOptions {
    pub max_restarts: usize,
    /// Success threshold on L.
    pub tol: f64,
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self {
            max_restarts: 10,
            tol: 1e-6,
            seed: 0,
            max_iterations: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompilationResult {
    pub ansatz: BrickworkAnsatz,
    pub params: Vec<f64>,
    pub final_loss: f64,
    pub iterations: usize,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Compiles the map `input ↦ target_unitary · input`.
pub fn compile(
    target_unitary: &DMatrix<Complex64>,
    input: &[Complex64],
    n_cz_layers: usize,
    opts: &CompileOptions,
) -> Result<CompilationResult> {
    if target_unitary.ncols() != input.len() || target_unitary.nrows() != input.len() {
        return Err(Error::DimensionMismatch {
            expected: target_unitary.ncols(),
            got: input.len(),
        });
    }
    let target: Vec<Complex64> = (target_unitary * DVector::from_column_slice(input))
        .iter()
        .cloned()
        .collect();
    compile_state(&target, input, n_cz_layers, opts)
}

/// Compiles towards an explicit output state.
pub fn compile_state(
    target: &[Complex64],
    input: &[Complex64],
    n_cz_layers: usize,
    opts: &CompileOptions,
) -> Result<CompilationResult> {
    if n_cz_layers == 0 {
        return Err(Error::InvalidArgument("n_cz_layers must be ≥ 1".into()));
    }
    if opts.max_restarts == 0 {
        return Err(Error::InvalidArgument("max_restarts must be ≥ 1".into()));
    }
    if target.len() != input.len() || !input.len().is_power_of_two() {
        return Err(Error::DimensionMismatch {
            expected: input.len(),
            got: target.len(),
        });
    }
    let n = input.len().trailing_zeros() as usize;
    let ansatz = BrickworkAnsatz::new(n, n_cz_layers)?;
    let bopts = BfgsOptions {
        max_iterations: opts.max_iterations,
        target_value: 0.0,
        ..BfgsOptions::default()
    };
    let mut best: Option<CompilationResult> = None;
    let mut total_iterations = 0;
    for restart in 0..opts.max_restarts {
        let mut rng = stream(opts.seed, restart as u64, Purpose::CompileRestart);
        let x0: Vec<f64> = (0..ansatz.n_params())
            .map(|_| rng.gen_range(-std::f64::consts::PI..=std::f64::consts::PI))
            .collect();
        let objective = |p: &[f64]| {
            ansatz
                .loss_and_gradient(p, target, input)
                .expect("dimensions checked")
        };
        let r = bfgs::minimize(objective, &x0, &bopts);
        total_iterations += r.iterations;
        let loss = ansatz.loss(&r.x, target, input)?;
        let candidate = CompilationResult {
            ansatz,
            params: r.x,
            final_loss: loss,
            iterations: total_iterations,
            restarts_used: restart + 1,
            converged: loss < opts.tol,
        };
        let better = best.as_ref().is_none_or(|b| candidate.final_loss < b.final_loss);
        if better {
            best = Some(candidate);
        }
        if let Some(b) = best.as_mut() {
            b.iterations = total_iterations;
            b.restarts_used = restart + 1;
            if b.converged {
                break;
            }
        }
    }
    Ok(best.expect("at least one restart"))
}
