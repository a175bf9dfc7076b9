//! Bin probabilities from QEEA-filtered samples.

use super::{AggregatedSamples, FilterKind};
use crate::error::{Error, Result};
use crate::fourier::QeeaFourierSpec;

/// p̃_j = ε/2π + √(2/π) Σ_k w_k [r̃_k cos(kλ_j) − s̃_k sin(kλ_j)] for the bins
/// λ_j = −α + jε, j = 0..=M, with w_k the signed importance weight.
pub fn qeea_probability_vector(agg: &AggregatedSamples, spec: &QeeaFourierSpec) -> Result<Vec<f64>> {
    match agg.filter {
        FilterKind::Qeea { epsilon, .. } if (epsilon - spec.epsilon).abs() <= 1e-15 * epsilon => {}
        _ => {
            return Err(Error::InvalidArgument(
                "samples were not drawn from this QEEA filter".into(),
            ))
        }
    }
    let c = (2.0 / std::f64::consts::PI).sqrt();
    let base = spec.epsilon / (2.0 * std::f64::consts::PI);
    Ok(spec
        .bin_centres()
        .iter()
        .map(|&l| {
            let s: f64 = agg
                .terms()
                .map(|(k, w, r, s)| {
                    let (sn, cs) = (k * l).sin_cos();
                    w * (r * cs - s * sn)
                })
                .sum();
            base + c * s
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::Filter;
    use crate::fourier::{qeea_coefficients, wan_coefficients, cdf_importance};
    use num_complex::Complex64;

    fn spec() -> QeeaFourierSpec {
        qeea_coefficients(0.05, 400, 1 << 14).unwrap()
    }

    fn full(spec: &QeeaFourierSpec, g: impl Fn(u64) -> Complex64) -> AggregatedSamples {
        let f = Filter::Qeea(spec.clone());
        AggregatedSamples::full_sums(&f.importance().unwrap(), f.kind(), 1.0, g).unwrap()
    }

    #[test]
    fn zero_signal_gives_floor() {
        let s = spec();
        let agg = full(&s, |_| Complex64::new(0.0, 0.0));
        let p = qeea_probability_vector(&agg, &s).unwrap();
        assert_eq!(p.len(), s.m + 1);
        for v in p {
            assert!((v - 0.05 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
        }
    }

    #[test]
    fn single_eigenvalue_matches_windows() {
        let s = spec();
        let x0 = 0.1234;
        let agg = full(&s, |k| Complex64::from_polar(1.0, -x0 * k as f64));
        let p = qeea_probability_vector(&agg, &s).unwrap();
        for (j, v) in p.iter().enumerate() {
            assert!((v - s.window(j, x0)).abs() < 1e-12);
        }
        let total: f64 = p.iter().sum();
        assert!((total - 1.0).abs() < 0.05);
    }

    #[test]
    fn rejects_cdf_samples() {
        let c = wan_coefficients(50.0, 30).unwrap();
        let dist = cdf_importance(&c);
        let agg = AggregatedSamples::full_sums(&dist, Filter::Cdf(c).kind(), 1.0, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(qeea_probability_vector(&agg, &spec()).is_err());
    }
}
