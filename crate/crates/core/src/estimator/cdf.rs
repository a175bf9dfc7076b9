//! CDF reconstruction, its derivative, traces and the W distance.

use serde::{Deserialize, Serialize};

use super::{AggregatedSamples, SampleRecord};
use crate::error::{Error, Result};
use crate::fourier::ImportanceDistribution;

/// G̃(x) = 1/2 + 2 Σ_k w_k [r̃_k sin(kx) + s̃_k cos(kx)], w_k = 𝒮 n_k / N_S.
pub fn cdf(agg: &AggregatedSamples, x: f64) -> f64 {
    let s: f64 = agg
        .terms()
        .map(|(k, w, r, s)| {
            let (sn, cs) = (k * x).sin_cos();
            w * (r * sn + s * cs)
        })
        .sum();
    0.5 + 2.0 * s
}

/// G̃′(x) up to the constant 2𝒮/N_S: Σ_k n_k k [r̃_k cos(kx) − s̃_k sin(kx)].
pub fn cdf_derivative(agg: &AggregatedSamples, x: f64) -> f64 {
    derivative_sum(agg, x) * agg.n_samples / agg.normalization
}

/// Σ w_k k [r cos − s sin], the exact derivative of G̃ divided by two.
fn derivative_sum(agg: &AggregatedSamples, x: f64) -> f64 {
    agg.terms()
        .map(|(k, w, r, s)| {
            let (sn, cs) = (k * x).sin_cos();
            w * k * (r * cs - s * sn)
        })
        .sum()
}

/// d/dx of [`cdf_derivative`].
pub(crate) fn cdf_second_derivative(agg: &AggregatedSamples, x: f64) -> f64 {
    let s: f64 = agg
        .terms()
        .map(|(k, w, r, s)| {
            let (sn, cs) = (k * x).sin_cos();
            -w * k * k * (r * sn + s * cs)
        })
        .sum();
    s * agg.n_samples / agg.normalization
}

/// d²/dx² of [`cdf_derivative`].
pub(crate) fn cdf_third_derivative(agg: &AggregatedSamples, x: f64) -> f64 {
    let s: f64 = agg
        .terms()
        .map(|(k, w, r, s)| {
            let (sn, cs) = (k * x).sin_cos();
            -w * k * k * k * (r * cs - s * sn)
        })
        .sum();
    s * agg.n_samples / agg.normalization
}

/// Per-sample form 1/2 + (2𝒮/N_S) Σ_i sign_i [r_i sin(k_i x) + s_i cos(k_i x)].
pub fn cdf_per_sample(records: &[SampleRecord], dist: &ImportanceDistribution, slot: usize, x: f64) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no samples".into()));
    }
    let mut s = 0.0;
    for rec in records {
        let i = dist
            .index_of(rec.k)
            .ok_or_else(|| Error::InvalidArgument(format!("k = {} is outside the filter support", rec.k)))?;
        let (r, im) = match (rec.r.get(slot), rec.s.get(slot)) {
            (Some(r), Some(s)) => (*r, *s),
            _ => return Err(Error::InvalidArgument(format!("no slot {slot}"))),
        };
        let (sn, cs) = (rec.k as f64 * x).sin_cos();
        s += dist.signs[i] * (r * sn + im * cs);
    }
    Ok(0.5 + 2.0 * dist.normalization / records.len() as f64 * s)
}

/// G̃ (and optionally G̃′) sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfTrace {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    pub derivative: Option<Vec<f64>>,
}

/// `points` evenly spaced samples over [lo, hi].
pub fn cdf_trace(agg: &AggregatedSamples, lo: f64, hi: f64, points: usize, with_derivative: bool) -> Result<CdfTrace> {
    if !(hi > lo) || points < 2 {
        return Err(Error::InvalidArgument(format!(
            "trace needs hi > lo and ≥ 2 points (got [{lo}, {hi}], {points})"
        )));
    }
    let x: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let values = x.iter().map(|&t| cdf(agg, t)).collect();
    let derivative = with_derivative.then(|| x.iter().map(|&t| cdf_derivative(agg, t)).collect());
    Ok(CdfTrace { x, values, derivative })
}

/// W = ∫_{−α}^{α} |G_a(x) − G_b(x)| dx by the trapezoid rule on the common
/// grid points inside [−α, α].
pub fn distance_w(a: &CdfTrace, b: &CdfTrace, alpha: f64) -> Result<f64> {
    if a.x.len() != b.x.len() || a.x.iter().zip(&b.x).any(|(p, q)| (p - q).abs() > 1e-12 * (1.0 + p.abs())) {
        return Err(Error::InvalidArgument("traces are on different grids".into()));
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let tol = 1e-12 * (1.0 + alpha);
    let pts: Vec<(f64, f64)> = a
        .x
        .iter()
        .zip(a.values.iter().zip(&b.values))
        .filter(|(x, _)| x.abs() <= alpha + tol)
        .map(|(x, (u, v))| (*x, (u - v).abs()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientData("fewer than two grid points inside [−α, α]".into()));
    }
    Ok(pts
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum())
}
