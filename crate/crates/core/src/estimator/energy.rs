//! Eigenvalue extraction from the maxima of G̃′.

use serde::{Deserialize, Serialize};

use super::cdf::{cdf, cdf_derivative, cdf_second_derivative, cdf_third_derivative};
use super::{AggregatedSamples, FilterKind};
use crate::error::{Error, Result};
use crate::fourier::delta_for_beta;

pub const DEFAULT_GRID_POINTS: usize = 2001;
pub const DEFAULT_JUMP_THRESHOLD: f64 = 0.05;
/// Accuracy used to turn β into a jump half-width δ when bracketing.
pub const BRACKET_EPSILON: f64 = 0.1;

const GOLDEN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub bracket: (f64, f64),
    /// Location of the derivative maximum (an eigenvalue of τH).
    pub tau_lambda: f64,
    /// tau_lambda / τ, without any constant shift.
    pub lambda: f64,
    pub objective: f64,
    /// The coarse maximum sat on the bracket edge.
    pub on_boundary: bool,
}

pub fn estimate_energy(agg: &AggregatedSamples, bracket: (f64, f64)) -> Result<EnergyEstimate> {
    estimate_energy_with(agg, bracket, DEFAULT_GRID_POINTS)
}

/// Grid scan of G̃′ over the bracket, golden-section refinement around the
/// best grid point, then a Newton polish on G̃″ = 0.
pub fn estimate_energy_with(agg: &AggregatedSamples, bracket: (f64, f64), points: usize) -> Result<EnergyEstimate> {
    let (lo, hi) = bracket;
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("empty bracket [{lo}, {hi}]")));
    }
    if agg.entries.is_empty() {
        return Err(Error::InsufficientData("no aggregated samples".into()));
    }
    let points = points.max(3);
    let step = (hi - lo) / (points - 1) as f64;
    let centre = 0.5 * (lo + hi);
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..points {
        let x = lo + step * i as f64;
        let v = cdf_derivative(agg, x);
        let closer = (x - centre).abs() < (lo + step * best.0 as f64 - centre).abs();
        if v > best.1 || (v == best.1 && closer) {
            best = (i, v);
        }
    }
    let on_boundary = best.0 == 0 || best.0 == points - 1;
    let mut a = lo + step * best.0.saturating_sub(1) as f64;
    let mut b = (lo + step * (best.0 + 1) as f64).min(hi);
    let f = |x: f64| cdf_derivative(agg, x);

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOLERANCE {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mut x = 0.5 * (a + b);
    // golden section stalls near sqrt(machine ε) of the peak width
    for _ in 0..4 {
        let g2 = cdf_second_derivative(agg, x);
        let g3 = cdf_third_derivative(agg, x);
        if !(g3 < 0.0) {
            break;
        }
        let nx = x - g2 / g3;
        if !((nx - x).abs() <= step && nx >= lo && nx <= hi) || f(nx) < f(x) - 1e-12 * f(x).abs() {
            break;
        }
        x = nx;
    }
    let objective = f(x);
    Ok(EnergyEstimate {
        bracket,
        tau_lambda: x,
        lambda: x / agg.tau,
        objective,
        on_boundary,
    })
}

/// Half-width of a jump: δ(β, 0.1) for the CDF filter, ε for QEEA.
pub fn jump_resolution(agg: &AggregatedSamples) -> f64 {
    match agg.filter {
        FilterKind::Cdf { beta, .. } => delta_for_beta(beta, BRACKET_EPSILON).unwrap_or(0.1),
        FilterKind::Qeea { epsilon, .. } => epsilon,
    }
}

/// Intervals of [−π, π] where G̃ rises by more than `threshold` across
/// [x − δ, x + δ], widened by δ on each side.
pub fn find_jump_brackets(agg: &AggregatedSamples, threshold: f64) -> Vec<(f64, f64)> {
    let pi = std::f64::consts::PI;
    let delta = jump_resolution(agg);
    let h = delta / 4.0;
    let n = (2.0 * pi / h).ceil() as usize;
    let mut marked: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for i in 0..=n {
        let x = -pi + (2.0 * pi) * i as f64 / n as f64;
        let rise = cdf(agg, x + delta) - cdf(agg, x - delta);
        if rise > threshold {
            open = Some(match open {
                Some((a, _)) => (a, x),
                None => (x, x),
            });
        } else if let Some(iv) = open.take() {
            marked.push(iv);
        }
    }
    if let Some(iv) = open {
        marked.push(iv);
    }
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in marked {
        let (a, b) = ((a - delta).max(-pi), (b + delta).min(pi));
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::Filter;
    use crate::fourier::{cdf_importance, wan_coefficients};
    use num_complex::Complex64;

    fn spectrum(points: &[(f64, f64)], beta: f64, d: usize) -> AggregatedSamples {
        let s = wan_coefficients(beta, d).unwrap();
        let dist = cdf_importance(&s);
        let g = |k: u64| {
            points
                .iter()
                .map(|(x, p)| Complex64::from_polar(*p, -x * k as f64))
                .sum::<Complex64>()
        };
        AggregatedSamples::full_sums(&dist, Filter::Cdf(s).kind(), 2.0, g).unwrap()
    }

    #[test]
    fn single_eigenvalue_exact_peak() {
        let x0 = -0.713;
        let agg = spectrum(&[(x0, 1.0)], 2000.0, 150);
        let e = estimate_energy(&agg, (-1.0, -0.4)).unwrap();
        assert!((e.tau_lambda - x0).abs() < 1e-9, "{}", e.tau_lambda - x0);
        assert!((e.lambda - x0 / 2.0).abs() < 1e-9);
        assert!(!e.on_boundary);
    }

    #[test]
    fn boundary_flagged() {
        let agg = spectrum(&[(0.5, 1.0)], 2000.0, 150);
        let e = estimate_energy(&agg, (-0.5, 0.47)).unwrap();
        assert!(e.on_boundary);
        assert!((e.tau_lambda - 0.47).abs() < 1e-9);
        assert!(estimate_energy(&agg, (0.2, 0.2)).is_err());
    }

    #[test]
    fn one_bracket_per_eigenvalue() {
        let agg = spectrum(&[(0.4, 1.0)], 2000.0, 150);
        let b = find_jump_brackets(&agg, DEFAULT_JUMP_THRESHOLD);
        assert_eq!(b.len(), 1);
        assert!(b[0].0 < 0.4 && 0.4 < b[0].1);
    }

    #[test]
    fn three_brackets() {
        let pts = [(-1.2, 0.6), (0.1, 0.3), (1.5, 0.1)];
        let agg = spectrum(&pts, 5000.0, 250);
        let b = find_jump_brackets(&agg, DEFAULT_JUMP_THRESHOLD);
        assert_eq!(b.len(), 3, "{b:?}");
        for ((x, _), iv) in pts.iter().zip(&b) {
            assert!(iv.0 < *x && *x < iv.1);
            let e = estimate_energy(&agg, *iv).unwrap();
            assert!((e.tau_lambda - x).abs() < 1e-6);
        }
    }

    #[test]
    fn flat_cdf_has_no_brackets() {
        let agg = spectrum(&[(0.0, 0.0)], 2000.0, 150);
        assert!(find_jump_brackets(&agg, DEFAULT_JUMP_THRESHOLD).is_empty());
    }
}
