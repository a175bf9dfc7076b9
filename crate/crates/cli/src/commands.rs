//! Subcommand implementations.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use statqpe::compiler::{compile, target_hash, CacheEntry, CompileCache, CompileOptions};
use statqpe::estimator::experiment::trotter_coefficients;
use statqpe::estimator::io::{cdf_trace_csv, gk_table_csv, parse_gk_table};
use statqpe::estimator::{
    cdf_trace, estimate_energy, find_jump_brackets, qeea_probability_vector, run_experiment, AggregatedSamples,
    CircuitMode, EnergyEstimate, Filter,
};
use statqpe::fourier::fmt_f64;
use statqpe::hamiltonian::{basis_state, spectral_measure, PauliSum};
use statqpe::simulator::hadamard::{controlled_evolution_unitary, plus_input};
use statqpe::simulator::trotter::trotter_eigenphases;
use statqpe::Error;

use crate::config::{ExperimentConfig, Loaded};
use crate::manifest::OutputDir;

/// Everything a subcommand needs after flag overrides.
pub struct Context {
    pub loaded: Loaded,
    pub seed: u64,
    pub out: PathBuf,
}

impl Context {
    fn config(&self) -> &ExperimentConfig {
        &self.loaded.config
    }

    fn resolved_config(&self) -> serde_json::Value {
        let mut c = self.config().clone();
        c.seed = self.seed;
        c.output_dir = Some(self.out.clone());
        serde_json::to_value(c).expect("config serializes")
    }

    fn problem(&self) -> Result<(PauliSum, String, f64), Error> {
        let h = self.config().hamiltonian(&self.loaded.base)?;
        let psi = self.config().psi_bits(h.n_qubits())?;
        let tau = self.config().tau(&h)?;
        Ok((h, psi, tau))
    }

    fn finish(self, dir: OutputDir, command: &str, failures: serde_json::Value, summary: serde_json::Value) -> Result<(), Error> {
        let config = self.resolved_config();
        dir.finish(command, config, self.seed, failures, summary)
    }
}

pub fn coeffs(ctx: Context) -> Result<(), Error> {
    let filter = ctx.config().filter()?;
    let dist = filter.importance()?;
    let mut dir = OutputDir::create(&ctx.out)?;
    dir.write("coefficients.csv", &dist.to_csv())?;
    let summary = match &filter {
        Filter::Cdf(s) => json!({
            "method": "cdf", "beta": s.beta, "d": s.d, "n_max": s.n_max(),
            "rows": dist.len(), "normalization": s.normalization,
        }),
        Filter::Qeea(s) => json!({
            "method": "qeea", "epsilon": s.epsilon, "n": s.n, "alpha": s.alpha, "bins": s.m + 1,
            "rows": dist.len(), "normalization": dist.normalization, "padding": s.padding,
        }),
    };
    ctx.finish(dir, "coeffs", json!([]), summary)
}

#[derive(Serialize)]
struct CompileRow {
    k: u64,
    loss: f64,
    converged: bool,
    restarts_used: usize,
    iterations: usize,
}

pub fn compile_all(ctx: Context) -> Result<(), Error> {
    let CircuitMode::Compiled { depth } = ctx.config().circuit_mode else {
        return Err(Error::InvalidArgument("compile needs circuit_mode = compiled".into()));
    };
    let (h, psi, tau) = ctx.problem()?;
    let input = plus_input(&basis_state(&psi)?);
    let ks = ctx.config().filter()?.importance()?.ks;
    let base = ctx.config().settings(ctx.seed).compile;
    let results: Vec<Result<(CompileRow, CacheEntry), Error>> = ks
        .par_iter()
        .map(|&k| {
            let u = controlled_evolution_unitary(&h, tau, k as i64)?;
            let opts = CompileOptions {
                seed: statqpe::rng::derive_seed(ctx.seed, k, statqpe::rng::Purpose::CompileRestart),
                ..base
            };
            let c = compile(&u, &input, depth, &opts)?;
            let target: Vec<_> = (0..input.len())
                .map(|i| (0..input.len()).map(|j| u[(i, j)] * input[j]).sum())
                .collect();
            let entry = CacheEntry {
                target_hash: target_hash(&target, &input),
                n_qubits: h.n_qubits() + 1,
                depth,
                params: c.params.clone(),
                loss: c.final_loss,
            };
            Ok((
                CompileRow {
                    k,
                    loss: c.final_loss,
                    converged: c.converged,
                    restarts_used: c.restarts_used,
                    iterations: c.iterations,
                },
                entry,
            ))
        })
        .collect();
    let mut csv = String::from("k,loss,converged,restarts_used,iterations\n");
    let mut cache = CompileCache::default();
    let mut failures = Vec::new();
    for (k, r) in ks.iter().zip(results) {
        let (row, entry) = r?;
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.k,
            fmt_f64(row.loss),
            row.converged,
            row.restarts_used,
            row.iterations
        ));
        if !row.converged {
            failures.push(json!({ "k": k, "loss": row.loss }));
        }
        cache.insert(entry);
    }
    let mut dir = OutputDir::create(&ctx.out)?;
    dir.write("compile.csv", &csv)?;
    dir.write_json("compile_cache.json", &cache)?;
    let summary = json!({ "depth": depth, "compiled": ks.len(), "not_converged": failures.len() });
    ctx.finish(dir, "compile", json!(failures), summary)
}

pub fn run(ctx: Context) -> Result<(), Error> {
    let (h, psi, tau) = ctx.problem()?;
    let filter = ctx.config().filter()?;
    let settings = ctx.config().settings(ctx.seed);
    let out = run_experiment(&h, &basis_state(&psi)?, tau, &filter, &settings)?;
    let mut dir = OutputDir::create(&ctx.out)?;
    dir.write("gk_table.csv", &gk_table_csv(&out.aggregated)?)?;
    let summary = json!({
        "tau": tau,
        "samples": out.samples.len(),
        "distinct_k": out.aggregated.entries.len(),
        "max_k": out.aggregated.max_k(),
        "max_cz_depth": out.max_cz_depth,
        "lambdas": out.aggregated.lambdas,
        "zne_fallbacks": out.aggregated.zne_fallbacks,
        "compile": out.compile,
    });
    ctx.finish(dir, "run", json!(out.failures), summary)
}

fn read_table(ctx: &Context, table: Option<&Path>) -> Result<(PauliSum, f64, Filter, AggregatedSamples), Error> {
    let (h, _, tau) = ctx.problem()?;
    let filter = ctx.config().filter()?;
    let path = table.map(Path::to_path_buf).unwrap_or_else(|| ctx.out.join("gk_table.csv"));
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let agg = parse_gk_table(&text, &filter.importance()?, filter.kind(), tau)?;
    Ok((h, tau, filter, agg))
}

#[derive(Serialize)]
struct Energy {
    bracket: (f64, f64),
    tau_lambda: f64,
    /// Eigenvalue of H without the constant shift.
    lambda: f64,
    /// Eigenvalue including the constant shift.
    energy: f64,
    objective: f64,
    on_boundary: bool,
}

#[derive(Serialize)]
struct SlotEnergies {
    /// Noise scale; 0 is the extrapolated slot.
    noise_scale: usize,
    energies: Vec<Energy>,
}

fn slot_energies(ctx: &Context, agg: &AggregatedSamples, shift: f64) -> Result<Vec<Energy>, Error> {
    let est = &ctx.config().estimate;
    let brackets = if est.brackets.is_empty() {
        find_jump_brackets(agg, est.jump_threshold)
    } else {
        est.brackets.clone()
    };
    brackets
        .into_iter()
        .map(|b| {
            let e: EnergyEstimate = estimate_energy(agg, b)?;
            Ok(Energy {
                bracket: e.bracket,
                tau_lambda: e.tau_lambda,
                lambda: e.lambda,
                energy: e.lambda + shift,
                objective: e.objective,
                on_boundary: e.on_boundary,
            })
        })
        .collect()
}

pub fn estimate(ctx: Context, table: Option<&Path>) -> Result<(), Error> {
    let (h, tau, filter, agg) = read_table(&ctx, table)?;
    if !matches!(filter, Filter::Cdf(_)) {
        return Err(Error::InvalidArgument("estimate needs method = cdf; use qeea".into()));
    }
    let est = ctx.config().estimate.clone();
    let shift = h.constant_shift();
    let mut dir = OutputDir::create(&ctx.out)?;
    let mut slots = Vec::new();
    for &l in &agg.lambdas {
        let a = agg.at_lambda(l)?;
        let trace = cdf_trace(&a, est.range.0, est.range.1, est.grid_points, true)?;
        let name = if agg.lambdas.len() == 1 {
            "cdf_trace.csv".to_string()
        } else {
            format!("cdf_trace_lambda{l}.csv")
        };
        dir.write(&name, &cdf_trace_csv(&trace)?)?;
        slots.push(SlotEnergies {
            noise_scale: l,
            energies: slot_energies(&ctx, &a, shift)?,
        });
    }
    dir.write_json("energies.json", &json!({ "tau": tau, "shift": shift, "slots": slots }))?;
    let summary = json!({ "slots": agg.lambdas, "k_values": agg.entries.len() });
    ctx.finish(dir, "estimate", json!([]), summary)
}

pub fn qeea(ctx: Context, table: Option<&Path>) -> Result<(), Error> {
    let (h, tau, filter, agg) = read_table(&ctx, table)?;
    let Filter::Qeea(spec) = &filter else {
        return Err(Error::InvalidArgument("qeea needs method = qeea".into()));
    };
    let agg = agg.at_lambda(agg.lambdas[agg.primary_slot()])?;
    let p = qeea_probability_vector(&agg, spec)?;
    let shift = h.constant_shift();
    let mut csv = String::from("j,tau_lambda,energy,probability\n");
    for (j, (x, pj)) in spec.bin_centres().iter().zip(&p).enumerate() {
        csv.push_str(&format!("{j},{},{},{}\n", fmt_f64(*x), fmt_f64(x / tau + shift), fmt_f64(*pj)));
    }
    let mut dir = OutputDir::create(&ctx.out)?;
    dir.write("qeea_bins.csv", &csv)?;
    let (jmax, pmax) = p
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(j, v)| (j, *v))
        .ok_or_else(|| Error::InsufficientData("no bins".into()))?;
    let summary = json!({
        "bins": p.len(),
        "total_mass": p.iter().sum::<f64>(),
        "mode_bin": jmax,
        "mode_tau_lambda": spec.bin_centre(jmax),
        "mode_probability": pmax,
        "tau": tau,
        "shift": shift,
    });
    ctx.finish(dir, "qeea", json!([]), summary)
}

pub fn oracle(ctx: Context) -> Result<(), Error> {
    let (h, psi, tau) = ctx.problem()?;
    let sm = spectral_measure(&h, tau, &basis_state(&psi)?)?;
    let shift = h.constant_shift();
    let trotter = trotter_coefficients(&h).ok().map(|(c1, c2)| {
        let ph = trotter_eigenphases(c1, c2, tau);
        json!({ "c1": c1, "c2": c2, "tau_lambda": ph, "lambda": [ph[0] / tau, ph[1] / tau] })
    });
    let report = json!({
        "n_qubits": h.n_qubits(),
        "tau": tau,
        "shift": shift,
        "psi": psi,
        "eigenvalues": sm.eigenvalues,
        "energies": sm.eigenvalues.iter().map(|l| l + shift).collect::<Vec<_>>(),
        "tau_lambda": sm.scaled_eigenvalues(),
        "overlaps": sm.overlaps,
        "trotter": trotter,
    });
    let mut dir = OutputDir::create(&ctx.out)?;
    dir.write_json("spectrum.json", &report)?;
    ctx.finish(dir, "oracle", json!([]), json!({ "eigenvalues": sm.eigenvalues.len() }))
}
