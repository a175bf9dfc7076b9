//! Importance-sampled phase estimation.
//!
//! Fourier indices k are drawn with probability |F_k|/𝒮, each draw runs a
//! pair of Hadamard tests, and the per-k means r̃_k, s̃_k feed the
//! reconstructed CDF
//!
//!   G̃(x) = 1/2 + (2𝒮/N_S) Σ_k n_k [r̃_k sin(kx) + s̃_k cos(kx)].
//!
//! Energies are the maxima of G̃′ inside each jump region.

pub mod cdf;
pub mod energy;
pub mod experiment;
pub mod io;
pub mod qeea;
pub mod sampling;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{cdf_importance, qeea_importance, CdfFourierSpec, ImportanceDistribution, QeeaFourierSpec};
use crate::mitigation::zne::{zne_fit, FitKind, ZneOptions, ZneSeries};

pub use cdf::{cdf, cdf_derivative, cdf_per_sample, cdf_trace, distance_w, CdfTrace};
pub use energy::{estimate_energy, find_jump_brackets, EnergyEstimate};
pub use experiment::{run_experiment, CircuitMode, ExperimentOutput, ExperimentSettings, MitigationConfig, Sampling};
pub use qeea::qeea_probability_vector;
pub use sampling::{draw_samples, expand_samples};

/// Filter parameters carried alongside aggregated data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum FilterKind {
    Cdf { beta: f64, d: usize },
    Qeea { epsilon: f64, n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Filter {
    Cdf(CdfFourierSpec),
    Qeea(QeeaFourierSpec),
}

impl Filter {
    pub fn kind(&self) -> FilterKind {
        match self {
            Filter::Cdf(s) => FilterKind::Cdf { beta: s.beta, d: s.d },
            Filter::Qeea(s) => FilterKind::Qeea {
                epsilon: s.epsilon,
                n: s.n,
            },
        }
    }

    pub fn importance(&self) -> Result<ImportanceDistribution> {
        match self {
            Filter::Cdf(s) => Ok(cdf_importance(s)),
            Filter::Qeea(s) => qeea_importance(s),
        }
    }
}

/// One importance sample: the drawn k and its Hadamard-test averages per
/// noise scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub k: u64,
    pub twirl_seed: Option<u64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    /// 0 for exact expectation values.
    pub shots_per_basis: u64,
}

/// Per-k means over all samples of that k, one entry per slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KAggregate {
    pub k: u64,
    /// Sample count; the probability P_k itself for full sums.
    pub n_k: f64,
    /// Sign of the filter coefficient (always +1 for the CDF filter).
    pub sign: f64,
    pub r: Vec<f64>,
    pub r_stderr: Vec<f64>,
    pub s: Vec<f64>,
    pub s_stderr: Vec<f64>,
}

/// Aggregated samples. `lambdas` labels the slots of every entry; the
/// extrapolated slot, when present, is labelled 0 and comes last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatedSamples {
    pub filter: FilterKind,
    pub tau: f64,
    /// 𝒮 = Σ|F_k|.
    pub normalization: f64,
    /// N_S; 1 for full sums.
    pub n_samples: f64,
    pub lambdas: Vec<usize>,
    pub entries: Vec<KAggregate>,
    #[serde(default)]
    pub zne_fallbacks: usize,
}

impl AggregatedSamples {
    fn empty(filter: FilterKind, tau: f64, dist: &ImportanceDistribution, n_samples: f64, lambdas: Vec<usize>) -> Self {
        Self {
            filter,
            tau,
            normalization: dist.normalization,
            n_samples,
            lambdas,
            entries: Vec::new(),
            zne_fallbacks: 0,
        }
    }

    /// Entries with weights `counts[i] / total` and noiseless values g(k).
    pub fn from_function(
        dist: &ImportanceDistribution,
        filter: FilterKind,
        tau: f64,
        counts: &[f64],
        total: f64,
        g: impl Fn(u64) -> Complex64,
    ) -> Result<Self> {
        if counts.len() != dist.len() {
            return Err(Error::DimensionMismatch {
                expected: dist.len(),
                got: counts.len(),
            });
        }
        let mut agg = Self::empty(filter, tau, dist, total, vec![1]);
        for (i, &c) in counts.iter().enumerate() {
            if c <= 0.0 {
                continue;
            }
            let k = dist.ks[i];
            let v = g(k);
            agg.entries.push(KAggregate {
                k,
                n_k: c,
                sign: dist.signs[i],
                r: vec![v.re],
                r_stderr: vec![0.0],
                s: vec![v.im],
                s_stderr: vec![0.0],
            });
        }
        Ok(agg)
    }

    /// Untruncated-in-probability sums: n_k/N_S replaced by P_k.
    pub fn full_sums(
        dist: &ImportanceDistribution,
        filter: FilterKind,
        tau: f64,
        g: impl Fn(u64) -> Complex64,
    ) -> Result<Self> {
        Self::from_function(dist, filter, tau, &dist.probabilities, 1.0, g)
    }

    /// Sampled counts with exact g_k.
    pub fn sampled_exact(
        dist: &ImportanceDistribution,
        filter: FilterKind,
        tau: f64,
        counts: &[usize],
        g: impl Fn(u64) -> Complex64,
    ) -> Result<Self> {
        let total: usize = counts.iter().sum();
        if total == 0 {
            return Err(Error::InsufficientData("no samples".into()));
        }
        let c: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        Self::from_function(dist, filter, tau, &c, total as f64, g)
    }

    /// Means of sample records grouped by k; records must share the slot
    /// layout `lambdas`. With more than one noise scale an extrapolated slot
    /// is appended.
    pub fn from_records(
        records: &[SampleRecord],
        dist: &ImportanceDistribution,
        filter: FilterKind,
        tau: f64,
        lambdas: &[usize],
        zne: &ZneOptions,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::InsufficientData("no successful samples".into()));
        }
        let slots = lambdas.len();
        if records.iter().any(|r| r.r.len() != slots || r.s.len() != slots) {
            return Err(Error::DimensionMismatch {
                expected: slots,
                got: records.iter().map(|r| r.r.len()).find(|&l| l != slots).unwrap_or(0),
            });
        }
        let mut sorted: Vec<&SampleRecord> = records.iter().collect();
        sorted.sort_by_key(|r| r.k);
        let mut agg = Self::empty(filter, tau, dist, records.len() as f64, lambdas.to_vec());
        for group in sorted.chunk_by(|a, b| a.k == b.k) {
            let k = group[0].k;
            let idx = dist
                .index_of(k)
                .ok_or_else(|| Error::InvalidArgument(format!("k = {k} is outside the filter support")))?;
            let mut e = KAggregate {
                k,
                n_k: group.len() as f64,
                sign: dist.signs[idx],
                r: Vec::with_capacity(slots),
                r_stderr: Vec::with_capacity(slots),
                s: Vec::with_capacity(slots),
                s_stderr: Vec::with_capacity(slots),
            };
            for slot in 0..slots {
                let (rm, rs) = mean_stderr(group.iter().map(|r| (r.r[slot], r.shots_per_basis)));
                let (sm, ss) = mean_stderr(group.iter().map(|r| (r.s[slot], r.shots_per_basis)));
                e.r.push(rm);
                e.r_stderr.push(rs);
                e.s.push(sm);
                e.s_stderr.push(ss);
            }
            agg.entries.push(e);
        }
        if slots > 1 {
            agg.extrapolate(zne)?;
        }
        Ok(agg)
    }

    /// Appends the zero-noise slot to every entry.
    pub fn extrapolate(&mut self, opts: &ZneOptions) -> Result<()> {
        if self.lambdas.contains(&0) {
            return Err(Error::InvalidArgument("already extrapolated".into()));
        }
        let x: Vec<f64> = self.lambdas.iter().map(|&l| l as f64).collect();
        let mut fallbacks = 0;
        for e in &mut self.entries {
            let (r, rs, rk) = extrapolate_one(&x, &e.r, &e.r_stderr, opts)?;
            let (s, ss, sk) = extrapolate_one(&x, &e.s, &e.s_stderr, opts)?;
            fallbacks += (rk == FitKind::Quadratic) as usize + (sk == FitKind::Quadratic) as usize;
            e.r.push(r);
            e.r_stderr.push(rs);
            e.s.push(s);
            e.s_stderr.push(ss);
        }
        self.lambdas.push(0);
        self.zne_fallbacks = fallbacks;
        Ok(())
    }

    pub fn has_extrapolation(&self) -> bool {
        self.lambdas.last() == Some(&0)
    }

    /// Slot used by the CDF and energy routines: the extrapolated one when
    /// present, otherwise the first noise scale.
    pub fn primary_slot(&self) -> usize {
        if self.has_extrapolation() {
            self.lambdas.len() - 1
        } else {
            0
        }
    }

    /// Copy restricted to one noise scale (0 for the extrapolated slot).
    pub fn at_lambda(&self, lambda: usize) -> Result<Self> {
        let slot = self
            .lambdas
            .iter()
            .position(|&l| l == lambda)
            .ok_or_else(|| Error::InvalidArgument(format!("no slot for lambda = {lambda}")))?;
        let pick = |v: &Vec<f64>| vec![v[slot]];
        Ok(Self {
            lambdas: vec![lambda],
            entries: self
                .entries
                .iter()
                .map(|e| KAggregate {
                    k: e.k,
                    n_k: e.n_k,
                    sign: e.sign,
                    r: pick(&e.r),
                    r_stderr: pick(&e.r_stderr),
                    s: pick(&e.s),
                    s_stderr: pick(&e.s_stderr),
                })
                .collect(),
            ..self.clone()
        })
    }

    /// Signed importance weight 𝒮 · sign_k · n_k / N_S of an entry.
    pub fn weight(&self, e: &KAggregate) -> f64 {
        e.sign * self.normalization * e.n_k / self.n_samples
    }

    pub fn max_k(&self) -> u64 {
        self.entries.iter().map(|e| e.k).max().unwrap_or(0)
    }

    /// (k, weight, r, s) in the primary slot.
    pub(crate) fn terms(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        let slot = self.primary_slot();
        self.entries
            .iter()
            .map(move |e| (e.k as f64, self.weight(e), e.r[slot], e.s[slot]))
    }
}

/// Mean and standard error of one slot. With a single sample the shot-noise
/// estimate √((1 − v²)/shots) stands in for the spread.
fn mean_stderr(values: impl Iterator<Item = (f64, u64)>) -> (f64, f64) {
    let v: Vec<(f64, u64)> = values.collect();
    let n = v.len() as f64;
    let mean = v.iter().map(|p| p.0).sum::<f64>() / n;
    if v.len() >= 2 {
        let var = v.iter().map(|p| (p.0 - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    } else if v[0].1 > 0 {
        (mean, ((1.0 - mean * mean).max(0.0) / v[0].1 as f64).sqrt())
    } else {
        (mean, 0.0)
    }
}

/// Extrapolated value, a first-order propagated error and the fit used.
fn extrapolate_one(x: &[f64], y: &[f64], stderr: &[f64], opts: &ZneOptions) -> Result<(f64, f64, FitKind)> {
    let fit = zne_fit(&ZneSeries::new(x.to_vec(), y.to_vec(), stderr.to_vec())?, opts)?;
    let mut var = 0.0;
    for i in 0..y.len() {
        if stderr[i] == 0.0 {
            continue;
        }
        let h = 1e-6;
        let mut yp = y.to_vec();
        yp[i] += h;
        let up = zne_fit(&ZneSeries::new(x.to_vec(), yp, stderr.to_vec())?, opts)?;
        var += ((up.estimate - fit.estimate) / h * stderr[i]).powi(2);
    }
    Ok((fit.estimate, var.sqrt(), fit.kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::wan_coefficients;

    fn setup() -> (ImportanceDistribution, FilterKind) {
        let spec = wan_coefficients(50.0, 30).unwrap();
        (cdf_importance(&spec), Filter::Cdf(spec).kind())
    }

    fn record(k: u64, r: f64, s: f64) -> SampleRecord {
        SampleRecord {
            k,
            twirl_seed: None,
            r: vec![r],
            s: vec![s],
            shots_per_basis: 100,
        }
    }

    #[test]
    fn means_per_k() {
        let (dist, kind) = setup();
        let recs = vec![record(3, 0.2, 0.1), record(1, 0.5, 0.0), record(3, 0.4, -0.1)];
        let agg = AggregatedSamples::from_records(&recs, &dist, kind, 1.0, &[1], &ZneOptions::default()).unwrap();
        assert_eq!(agg.entries.len(), 2);
        assert_eq!(agg.entries[1].k, 3);
        assert_eq!(agg.entries[1].n_k, 2.0);
        assert!((agg.entries[1].r[0] - 0.3).abs() < 1e-15);
        assert!(agg.entries[1].s[0].abs() < 1e-15);
        assert!((agg.entries[1].r_stderr[0] - 0.1).abs() < 1e-12);
        assert_eq!(agg.n_samples, 3.0);
        let total: f64 = agg.entries.iter().map(|e| e.n_k).sum();
        assert_eq!(total, agg.n_samples);
    }

    #[test]
    fn foreign_k_rejected() {
        let (dist, kind) = setup();
        let recs = vec![record(2, 0.2, 0.1)];
        assert!(AggregatedSamples::from_records(&recs, &dist, kind, 1.0, &[1], &ZneOptions::default()).is_err());
    }

    #[test]
    fn extrapolated_slot_appended() {
        let (dist, kind) = setup();
        let mk = |k| SampleRecord {
            k,
            twirl_seed: Some(7),
            r: vec![0.5 * (-0.1f64).exp(), 0.5 * (-0.3f64).exp(), 0.5 * (-0.5f64).exp()],
            s: vec![0.2, 0.2, 0.2],
            shots_per_basis: 0,
        };
        let agg = AggregatedSamples::from_records(&[mk(1), mk(5)], &dist, kind, 1.0, &[1, 3, 5], &ZneOptions::default())
            .unwrap();
        assert_eq!(agg.lambdas, vec![1, 3, 5, 0]);
        assert_eq!(agg.primary_slot(), 3);
        assert!((agg.entries[0].r[3] - 0.5).abs() < 1e-9);
        assert!((agg.entries[0].s[3] - 0.2).abs() < 1e-12);
        let one = agg.at_lambda(3).unwrap();
        assert_eq!(one.lambdas, vec![3]);
        assert!((one.entries[1].r[0] - 0.5 * (-0.3f64).exp()).abs() < 1e-15);
        assert!(agg.at_lambda(7).is_err());
    }
}
