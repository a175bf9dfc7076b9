//! Fourier coefficients for spectral filters.
//!
//! The CDF filter approximates the 2π-periodic step Θ(x) by
//!
//!   F(x) = 1/2 + Σ_{odd k, |k| ≤ N} F_k e^{ikx},   F_k = −i|F_k| for k > 0,
//!
//! with magnitudes built from scaled Bessel functions. The QEEA filter
//! replaces the step by overlapping bump-smoothed bin windows, see [`qeea`].

pub mod bessel;
pub mod lambert;
pub mod qeea;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lambert::lambert_w;
pub use qeea::{qeea_coefficients, QeeaFourierSpec};

/// Truncated CDF filter: `magnitudes[j] = |F_{2j+1}|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfFourierSpec {
    pub beta: f64,
    pub d: usize,
    pub magnitudes: Vec<f64>,
    pub normalization: f64,
}

impl CdfFourierSpec {
    /// Largest frequency N = 2d + 1.
    pub fn n_max(&self) -> u64 {
        2 * self.d as u64 + 1
    }

    pub fn ks(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.magnitudes.len()).map(|j| 2 * j as u64 + 1)
    }

    /// |F_k|, zero for even or out-of-range k.
    pub fn magnitude(&self, k: u64) -> f64 {
        if k % 2 == 0 {
            return 0.0;
        }
        self.magnitudes.get((k / 2) as usize).copied().unwrap_or(0.0)
    }
}

/// `β = max{ W(3/(πε²)) / (4 sin²δ), 1 }`.
pub fn select_beta(delta: f64, epsilon: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!("delta must lie in (0, π/2), got {delta}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let w = lambert_w(3.0 / (std::f64::consts::PI * epsilon * epsilon))?;
    Ok((w / (4.0 * delta.sin().powi(2))).max(1.0))
}

/// Inverse of [`select_beta`] in δ: the resolution a given β buys at accuracy ε.
pub fn delta_for_beta(beta: f64, epsilon: f64) -> Result<f64> {
    if !(beta > 0.0 && epsilon > 0.0) {
        return Err(Error::Domain("beta and epsilon must be positive".into()));
    }
    let w = lambert_w(3.0 / (std::f64::consts::PI * epsilon * epsilon))?;
    Ok((w / (4.0 * beta)).sqrt().min(1.0).asin())
}

/// CDF filter magnitudes for odd k up to 2d+1.
pub fn wan_coefficients(beta: f64, d: usize) -> Result<CdfFourierSpec> {
    if !(beta >= 1.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta must be ≥ 1, got {beta}")));
    }
    if d == 0 {
        return Err(Error::Domain("d must be ≥ 1".into()));
    }
    let scaled = bessel::scaled_bessel_i(beta, d)?;
    let pre = (beta / (2.0 * std::f64::consts::PI)).sqrt();
    let mut magnitudes = Vec::with_capacity(d + 1);
    for j in 0..d {
        magnitudes.push(pre * (scaled[j] + scaled[j + 1]) / (2 * j + 1) as f64);
    }
    magnitudes.push(pre * scaled[d] / (2 * d + 1) as f64);
    if let Some(j) = magnitudes.iter().position(|m| !(m.is_finite() && *m > 0.0)) {
        return Err(Error::Numerical(format!("|F_{}| is not a positive finite number", 2 * j + 1)));
    }
    let normalization = magnitudes.iter().sum();
    Ok(CdfFourierSpec {
        beta,
        d,
        magnitudes,
        normalization,
    })
}

/// F(x) = 1/2 + 2 Σ |F_k| sin(kx).
pub fn heaviside_reconstruction(spec: &CdfFourierSpec, x: f64) -> f64 {
    let s: f64 = spec
        .magnitudes
        .iter()
        .enumerate()
        .map(|(j, m)| m * ((2 * j + 1) as f64 * x).sin())
        .sum();
    0.5 + 2.0 * s
}

/// The 2π-periodic unit step: 1 on (0, π), 0 on (−π, 0), 1/2 at the jumps.
pub fn periodic_step(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * std::f64::consts::PI);
    if y == 0.0 || y == std::f64::consts::PI {
        0.5
    } else if y < std::f64::consts::PI {
        1.0
    } else {
        0.0
    }
}

/// Largest |Θ(x) − F(x)| over `points` evenly spaced x on each of
/// [δ, π−δ] and [−π+δ, −δ].
pub fn heaviside_sup_error(spec: &CdfFourierSpec, delta: f64, points: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let points = points.max(2);
    let mut worst: f64 = 0.0;
    for i in 0..points {
        let t = i as f64 / (points - 1) as f64;
        let x = delta + t * (pi - 2.0 * delta);
        let f = heaviside_reconstruction(spec, x);
        worst = worst.max((1.0 - f).abs());
        let g = heaviside_reconstruction(spec, -x);
        worst = worst.max(g.abs());
    }
    worst
}

/// Outcome of the d-selection search.
#[derive(Debug, Clone)]
pub struct DSelection {
    pub spec: CdfFourierSpec,
    pub sup_error: f64,
}

/// Doubles d until the grid-checked reconstruction error on the bands
/// `[δ, π−δ] ∪ [−π+δ, −δ]` is at most ε.
pub fn select_d(beta: f64, epsilon: f64, delta: f64) -> Result<DSelection> {
    const GRID: usize = 10_000;
    const MAX_D: usize = 1 << 22;
    let mut d = 4usize;
    loop {
        let spec = wan_coefficients(beta, d)?;
        let sup_error = heaviside_sup_error(&spec, delta, GRID);
        if sup_error <= epsilon {
            return Ok(DSelection { spec, sup_error });
        }
        if d >= MAX_D {
            return Err(Error::Numerical(format!(
                "no d ≤ {MAX_D} reaches accuracy {epsilon} at β = {beta}"
            )));
        }
        d *= 2;
    }
}

/// Discrete distribution over Fourier indices, P_k = |F_k| / 𝒮, with the
/// coefficient signs kept aside for re-weighting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceDistribution {
    pub ks: Vec<u64>,
    pub magnitudes: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub signs: Vec<f64>,
    pub normalization: f64,
}

impl ImportanceDistribution {
    pub fn from_signed(ks: Vec<u64>, coefficients: &[f64]) -> Result<Self> {
        if ks.len() != coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: ks.len(),
                got: coefficients.len(),
            });
        }
        let magnitudes: Vec<f64> = coefficients.iter().map(|c| c.abs()).collect();
        let normalization: f64 = magnitudes.iter().sum();
        if !(normalization > 0.0 && normalization.is_finite()) {
            return Err(Error::InvalidArgument("coefficients have no mass".into()));
        }
        let probabilities = magnitudes.iter().map(|m| m / normalization).collect();
        let signs = coefficients
            .iter()
            .map(|c| if *c < 0.0 { -1.0 } else { 1.0 })
            .collect();
        Ok(Self {
            ks,
            magnitudes,
            probabilities,
            signs,
            normalization,
        })
    }

    pub fn len(&self) -> usize {
        self.ks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ks.is_empty()
    }

    pub fn probability(&self, k: u64) -> f64 {
        self.index_of(k).map_or(0.0, |i| self.probabilities[i])
    }

    pub fn index_of(&self, k: u64) -> Option<usize> {
        self.ks.binary_search(&k).ok()
    }

    /// Draws `n` indices into the support and returns per-support counts.
    pub fn sample_counts<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        let mut counts = vec![0usize; self.ks.len()];
        let sampler = WeightedIndex::new(&self.probabilities).expect("valid weights");
        for _ in 0..n {
            counts[sampler.sample(rng)] += 1;
        }
        counts
    }

    /// CSV with columns k, magnitude, probability (and sign when any is negative).
    pub fn to_csv(&self) -> String {
        let signed = self.signs.iter().any(|s| *s < 0.0);
        let mut out = String::from(if signed {
            "k,magnitude,probability,sign\n"
        } else {
            "k,magnitude,probability\n"
        });
        for i in 0..self.ks.len() {
            out.push_str(&format!(
                "{},{},{}",
                self.ks[i],
                fmt_f64(self.magnitudes[i]),
                fmt_f64(self.probabilities[i])
            ));
            if signed {
                out.push_str(&format!(",{}", self.signs[i] as i8));
            }
            out.push('\n');
        }
        out
    }
}

/// Importance distribution of the CDF filter.
pub fn cdf_importance(spec: &CdfFourierSpec) -> ImportanceDistribution {
    ImportanceDistribution::from_signed(spec.ks().collect(), &spec.magnitudes)
        .expect("CDF magnitudes are positive")
}

/// Importance distribution of the QEEA filter (signs retained).
pub fn qeea_importance(spec: &QeeaFourierSpec) -> Result<ImportanceDistribution> {
    ImportanceDistribution::from_signed((1..=spec.coefficients.len() as u64).collect(), &spec.coefficients)
}

/// Formats with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn select_beta_examples() {
        let b = select_beta(0.003, 0.1).unwrap();
        assert!((b - 9.3e4).abs() / 9.3e4 < 0.01, "{b}");
        let w = lambert_w(3.0 / (std::f64::consts::PI * 0.01)).unwrap();
        assert!((b - w / (4.0 * 0.003f64.sin().powi(2))).abs() < 1e-9 * b);
        assert_eq!(select_beta(std::f64::consts::FRAC_PI_3, 10.0).unwrap(), 1.0);
        let b = select_beta(0.13, 0.1).unwrap();
        assert!((b - 50.0).abs() < 1.0, "{b}");
        assert!(select_beta(0.0, 0.1).is_err());
        assert!(select_beta(0.1, -1.0).is_err());
        let back = delta_for_beta(select_beta(0.13, 0.1).unwrap(), 0.1).unwrap();
        assert!((back - 0.13).abs() < 1e-12);
    }

    #[test]
    fn first_coefficient_beta_ten() {
        let spec = wan_coefficients(10.0, 3).unwrap();
        let want = 0.314_251_132_751_951_7;
        assert!(((spec.magnitudes[0] - want) / want).abs() < 1e-12);
        assert_eq!(spec.n_max(), 7);
        assert_eq!(spec.magnitudes.len(), 4);
    }

    #[test]
    fn last_coefficient_uses_single_bessel_term() {
        let beta = 50.0;
        let spec = wan_coefficients(beta, 30).unwrap();
        let i30 = 8.245_393_352_089_968e-6;
        let want = (beta / (2.0 * std::f64::consts::PI)).sqrt() * i30 / 61.0;
        assert!(((spec.magnitude(61) - want) / want).abs() < 1e-11);
        assert_eq!(spec.magnitude(62), 0.0);
        assert_eq!(spec.magnitude(63), 0.0);
    }

    #[test]
    fn huge_beta_is_finite() {
        let spec = wan_coefficients(1e6, 5000).unwrap();
        assert_eq!(spec.magnitudes.len(), 5001);
        assert!(spec.magnitudes.iter().all(|m| m.is_finite() && *m > 0.0));
        assert!(spec.normalization.is_finite());
    }

    #[test]
    fn reconstruction_basics() {
        let spec = wan_coefficients(50.0, 30).unwrap();
        assert_eq!(heaviside_reconstruction(&spec, 0.0), 0.5);
        for &x in &[0.1, 0.7, 2.0, 3.0] {
            let s = heaviside_reconstruction(&spec, x) + heaviside_reconstruction(&spec, -x);
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn half_pi_is_near_one_for_sharp_filter() {
        let spec = wan_coefficients(1e5, 2000).unwrap();
        assert!((heaviside_reconstruction(&spec, std::f64::consts::FRAC_PI_2) - 1.0).abs() < 0.1);
    }

    #[test]
    fn select_d_meets_band_accuracy() {
        let beta = select_beta(0.13, 0.1).unwrap();
        let sel = select_d(beta, 0.1, 0.13).unwrap();
        assert!(sel.sup_error <= 0.1);
        assert!(heaviside_sup_error(&sel.spec, 0.13, 10_000) <= 0.1);
    }

    #[test]
    fn importance_probabilities() {
        let spec = wan_coefficients(1e5, 2000).unwrap();
        let dist = cdf_importance(&spec);
        let total: f64 = dist.probabilities.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        // ratio oracle: P_k = |F_k| / Σ|F_k| from the Bessel sequence directly
        let logs = bessel::log_scaled_bessel_i(1e5, 2000).unwrap();
        let e: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
        let mut raw: Vec<f64> = (0..2000).map(|j| (e[j] + e[j + 1]) / (2 * j + 1) as f64).collect();
        raw.push(e[2000] / 4001.0);
        let sum: f64 = raw.iter().sum();
        assert!((dist.probability(1) - raw[0] / sum).abs() < 1e-14);
        // independent values from an external scaled-Bessel implementation
        assert!((dist.probability(1) - 0.257_137_242_280_655).abs() < 1e-12);
        assert!((dist.probability(3) - 0.085_711_556_971_553_55).abs() < 1e-12);
    }

    #[test]
    fn single_coefficient_distribution() {
        let d = ImportanceDistribution::from_signed(vec![5], &[-0.3]).unwrap();
        assert_eq!(d.probabilities, vec![1.0]);
        assert_eq!(d.signs, vec![-1.0]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert_eq!(d.sample_counts(17, &mut rng), vec![17]);
    }

    #[test]
    fn csv_layout() {
        let spec = wan_coefficients(50.0, 30).unwrap();
        let csv = cdf_importance(&spec).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,magnitude,probability");
        assert_eq!(lines.len(), 32);
        let v: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, spec.magnitudes[0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn reconstruction_is_odd_about_half(beta in 1.0f64..2e3, d in 1usize..80, x in -10.0f64..10.0) {
            let spec = wan_coefficients(beta, d).unwrap();
            let s = heaviside_reconstruction(&spec, x) + heaviside_reconstruction(&spec, -x);
            prop_assert!((s - 1.0).abs() < 1e-13);
        }

        #[test]
        fn importance_is_a_distribution(beta in 100.0f64..1e5, d in 1usize..300) {
            let spec = wan_coefficients(beta, d).unwrap();
            let dist = cdf_importance(&spec);
            prop_assert!(dist.probabilities.iter().all(|p| *p > 0.0 && *p <= 1.0));
            prop_assert!((dist.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
