//! Zero-noise extrapolation fits.
//!
//! The primary model is a signed exponential y = a e^{−bλ} with b ≥ 0. When
//! it fails to converge or |a| > 1.2, a quadratic in λ is used instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponential extrapolates larger than this in magnitude are rejected.
pub const EXPONENTIAL_LIMIT: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    Exponential,
    Quadratic,
}

impl FitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FitKind::Exponential => "exponential",
            FitKind::Quadratic => "quadratic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZneSeries {
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    pub stderrs: Vec<f64>,
}

impl ZneSeries {
    pub fn new(lambdas: Vec<f64>, values: Vec<f64>, stderrs: Vec<f64>) -> Result<Self> {
        if lambdas.len() != values.len() || stderrs.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: lambdas.len(),
                got: values.len(),
            });
        }
        Ok(Self {
            lambdas,
            values,
            stderrs,
        })
    }

    pub fn unweighted(lambdas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new(lambdas, values, vec![0.0; n])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZneFit {
    pub estimate: f64,
    pub kind: FitKind,
    /// (a, b) for the exponential, (c₀, c₁, c₂) for the quadratic.
    pub coefficients: Vec<f64>,
    /// Exponential parameters even when they were rejected.
    pub exponential: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ZneOptions {
    /// Weight points by 1/σ² (requires positive standard errors).
    pub inverse_variance: bool,
}

fn weights(series: &ZneSeries, opts: &ZneOptions) -> Vec<f64> {
    if opts.inverse_variance && series.stderrs.iter().all(|s| *s > 0.0 && s.is_finite()) {
        series.stderrs.iter().map(|s| 1.0 / (s * s)).collect()
    } else {
        vec![1.0; series.values.len()]
    }
}

/// Extrapolates to λ = 0.
pub fn zne_fit(series: &ZneSeries, opts: &ZneOptions) -> Result<ZneFit> {
    if series.values.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "zero-noise extrapolation needs ≥ 3 points, got {}",
            series.values.len()
        )));
    }
    if series.values.iter().chain(&series.lambdas).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite ZNE input".into()));
    }
    let w = weights(series, opts);
    let exp = fit_exponential(&series.lambdas, &series.values, &w);
    if let Some((a, b)) = exp {
        if a.abs() <= EXPONENTIAL_LIMIT {
            return Ok(ZneFit {
                estimate: a,
                kind: FitKind::Exponential,
                coefficients: vec![a, b],
                exponential: exp,
            });
        }
    }
    let c = fit_quadratic(&series.lambdas, &series.values, &w)?;
    Ok(ZneFit {
        estimate: c[0],
        kind: FitKind::Quadratic,
        coefficients: c.to_vec(),
        exponential: exp,
    })
}

fn weighted_sse(x: &[f64], y: &[f64], w: &[f64], a: f64, b: f64) -> f64 {
    x.iter()
        .zip(y)
        .zip(w)
        .map(|((xi, yi), wi)| wi * (yi - a * (-b * xi).exp()).powi(2))
        .sum()
}

/// Optimal a for fixed b (linear least squares).
fn best_a(x: &[f64], y: &[f64], w: &[f64], b: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for ((xi, yi), wi) in x.iter().zip(y).zip(w) {
        let e = (-b * xi).exp();
        num += wi * yi * e;
        den += wi * e * e;
    }
    num / den
}

/// Levenberg–Marquardt on (a, b) with b projected onto [0, ∞).
/// Returns `None` if the iteration does not settle.
pub fn fit_exponential(x: &[f64], y: &[f64], w: &[f64]) -> Option<(f64, f64)> {
    // start from the log-linear fit of |y|
    let ly: Vec<f64> = y.iter().map(|v| v.abs().max(1e-12).ln()).collect();
    let (sw, sx, sy, sxx, sxy) = x.iter().zip(&ly).zip(w).fold(
        (0.0, 0.0, 0.0, 0.0, 0.0),
        |acc, ((xi, yi), wi)| {
            (
                acc.0 + wi,
                acc.1 + wi * xi,
                acc.2 + wi * yi,
                acc.3 + wi * xi * xi,
                acc.4 + wi * xi * yi,
            )
        },
    );
    let denom = sw * sxx - sx * sx;
    let slope = if denom.abs() > 0.0 { (sw * sxy - sx * sy) / denom } else { 0.0 };
    let mut b = (-slope).max(0.0);
    let mut a = best_a(x, y, w, b);
    let mut mu = 1e-3;
    let mut sse = weighted_sse(x, y, w, a, b);
    let scale = y.iter().map(|v| v * v).sum::<f64>().max(1e-300);
    for _ in 0..500 {
        // J^T W J and J^T W r for r = y − a e^{−bx}
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((xi, yi), wi) in x.iter().zip(y).zip(w) {
            let e = (-b * xi).exp();
            let r = yi - a * e;
            let da = e;
            let db = -a * xi * e;
            jaa += wi * da * da;
            jab += wi * da * db;
            jbb += wi * db * db;
            ga += wi * da * r;
            gb += wi * db * r;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let m00 = jaa * (1.0 + mu);
            let m11 = jbb * (1.0 + mu) + 1e-300;
            let det = m00 * m11 - jab * jab;
            if det == 0.0 || !det.is_finite() {
                mu *= 10.0;
                continue;
            }
            let step_a = (m11 * ga - jab * gb) / det;
            let step_b = (m00 * gb - jab * ga) / det;
            let na = a + step_a;
            let nb = (b + step_b).max(0.0);
            let nsse = weighted_sse(x, y, w, na, nb);
            if nsse.is_finite() && nsse <= sse {
                let done = (nsse - sse).abs() <= 1e-15 * scale.max(sse)
                    && (na - a).abs() <= 1e-12 * (1.0 + a.abs())
                    && (nb - b).abs() <= 1e-12 * (1.0 + b.abs());
                a = na;
                b = nb;
                sse = nsse;
                mu = (mu / 3.0).max(1e-15);
                accepted = true;
                if done {
                    return Some((a, b));
                }
                break;
            }
            mu *= 4.0;
        }
        if !accepted {
            // no descent step exists: stationary (possibly on the b = 0 face)
            let at_face = b == 0.0 && gb <= 1e-12 * scale.sqrt();
            let grad_small = ga.abs() <= 1e-10 * scale.sqrt() && (gb.abs() <= 1e-10 * scale.sqrt() || at_face);
            return grad_small.then_some((a, b));
        }
    }
    None
}

/// Weighted least-squares quadratic c₀ + c₁λ + c₂λ².
pub fn fit_quadratic(x: &[f64], y: &[f64], w: &[f64]) -> Result<[f64; 3]> {
    let mut m = nalgebra::Matrix3::<f64>::zeros();
    let mut v = nalgebra::Vector3::<f64>::zeros();
    for ((xi, yi), wi) in x.iter().zip(y).zip(w) {
        let basis = [1.0, *xi, xi * xi];
        for r in 0..3 {
            v[r] += wi * basis[r] * yi;
            for c in 0..3 {
                m[(r, c)] += wi * basis[r] * basis[c];
            }
        }
    }
    let sol = m
        .lu()
        .solve(&v)
        .ok_or_else(|| Error::Numerical("quadratic fit is singular".into()))?;
    Ok([sol[0], sol[1], sol[2]])
}
