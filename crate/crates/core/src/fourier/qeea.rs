//! Bump-window Fourier coefficients for the QEEA bin filter.
//!
//! Bin j is centred at λ_j = −α + jε and has the window
//!
//!   f_j(x) = (χ_{[−ε/2, ε/2]} * h_{ε/2})(x − λ_j),
//!
//! where h_{ε/2}(x) = (2/ε) h(2x/ε) and h(u) = a e^{−1/(1−u²)} on |u| < 1
//! integrates to one. The periodized window has the cosine series
//!
//!   f_j(x) = ε/2π + √(2/π) Σ_{k≥1} F_k cos(k(x − λ_j)),
//!   F_k = √(2/π) Ĥ(kε/2) sin(kε/2)/k,
//!
//! with Ĥ(ω) = ∫ h(u) e^{−iωu} du. Neighbouring windows overlap and the
//! windows of consecutive bins sum to one.

use rand::{Rng, SeedableRng};
use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bin range half-width.
pub const DEFAULT_ALPHA: f64 = 0.5;

const RESIDUAL_LIMIT: f64 = 1e-8;
const MIN_PADDING: usize = 8;
const MAX_PADDING: usize = 256;
const CHECK_POINTS: usize = 16;
const STENCIL: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QeeaFourierSpec {
    pub epsilon: f64,
    /// Series length; coefficients cover k = 1..N−1.
    pub n: usize,
    /// `coefficients[k−1] = F_k`.
    pub coefficients: Vec<f64>,
    pub alpha: f64,
    /// Bins are j = 0..=m.
    pub m: usize,
    pub normalization_constant: f64,
    pub padding: usize,
}

impl QeeaFourierSpec {
    pub fn coefficient(&self, k: i64) -> f64 {
        let k = k.unsigned_abs() as usize;
        if k == 0 || k > self.coefficients.len() {
            0.0
        } else {
            self.coefficients[k - 1]
        }
    }

    pub fn bin_centre(&self, j: usize) -> f64 {
        -self.alpha + j as f64 * self.epsilon
    }

    pub fn bin_centres(&self) -> Vec<f64> {
        (0..=self.m).map(|j| self.bin_centre(j)).collect()
    }

    /// Changes the bin range; the bin count follows as ⌈2α/ε⌉.
    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < std::f64::consts::PI) {
            return Err(Error::Domain(format!("alpha must lie in (0, π), got {alpha}")));
        }
        self.alpha = alpha;
        self.m = bin_count(alpha, self.epsilon);
        Ok(self)
    }

    /// Truncated window value f_j(x).
    pub fn window(&self, j: usize, x: f64) -> f64 {
        let c = (2.0 / std::f64::consts::PI).sqrt();
        let y = x - self.bin_centre(j);
        let s: f64 = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, f)| f * ((i + 1) as f64 * y).cos())
            .sum();
        self.epsilon / (2.0 * std::f64::consts::PI) + c * s
    }
}

fn bin_count(alpha: f64, epsilon: f64) -> usize {
    (2.0 * alpha / epsilon - 1e-9).ceil() as usize
}

/// Unnormalized bump e^{−1/(1−u²)} on (−1, 1).
pub fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// a with a ∫ e^{−1/(1−u²)} du = 1, by trapezoid on a fine grid (the
/// integrand is flat to all orders at ±1, so the rule converges rapidly).
pub fn bump_normalization() -> f64 {
    let n = 1 << 14;
    let du = 2.0 / n as f64;
    let s: f64 = (1..n).map(|m| bump(-1.0 + m as f64 * du)).sum();
    1.0 / (s * du)
}

/// Ĥ(ω) by direct trapezoid quadrature on `points` intervals.
pub fn bump_transform_direct(omega: f64, a: f64, points: usize) -> f64 {
    let du = 2.0 / points as f64;
    let s: f64 = (1..points)
        .map(|m| {
            let u = -1.0 + m as f64 * du;
            bump(u) * (omega * u).cos()
        })
        .sum();
    a * s * du
}

/// Ĥ sampled on a uniform frequency grid via zero-padded FFT.
struct TransformTable {
    spacing: f64,
    values: Vec<f64>,
}

impl TransformTable {
    fn build(a: f64, grid_size: usize, padding: usize, omega_max: f64) -> Self {
        let len = grid_size * padding;
        let du = 2.0 / grid_size as f64;
        let mut buf: Vec<Complex64> = (0..len)
            .map(|m| {
                if m < grid_size {
                    Complex64::new(bump(-1.0 + m as f64 * du), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        FftPlanner::new().plan_fft_forward(len).process(&mut buf);
        let spacing = 2.0 * std::f64::consts::PI / (len as f64 * du);
        let needed = ((omega_max / spacing).ceil() as usize + STENCIL + 1).min(len / 2);
        // grid starts at u = −1, so Ĥ(ω_q) = du e^{iω_q} FFT_q
        let values = (0..needed)
            .map(|q| {
                let w = q as f64 * spacing;
                (a * du * Complex64::from_polar(1.0, w) * buf[q]).re
            })
            .collect();
        Self { spacing, values }
    }

    fn at_index(&self, q: i64) -> f64 {
        self.values[q.unsigned_abs() as usize]
    }

    /// 8-point Lagrange interpolation; Ĥ is even, so negative nodes mirror.
    fn eval(&self, omega: f64) -> f64 {
        let t = omega.abs() / self.spacing;
        let base = t.floor() as i64 - (STENCIL as i64 / 2 - 1);
        let mut out = 0.0;
        for i in 0..STENCIL as i64 {
            let xi = (base + i) as f64;
            let mut w = 1.0;
            for j in 0..STENCIL as i64 {
                if j != i {
                    let xj = (base + j) as f64;
                    w *= (t - xj) / (xi - xj);
                }
            }
            out += w * self.at_index(base + i);
        }
        out
    }
}

/// Bump-window coefficients F_k for k = 1..N−1.
///
/// The transform table is refined by doubling the zero padding until the
/// interpolated Ĥ agrees with direct quadrature at 16 seeded frequencies
/// to 1e-8; otherwise the grid is reported as too coarse.
pub fn qeea_coefficients(epsilon: f64, n: usize, grid_size: usize) -> Result<QeeaFourierSpec> {
    if !(epsilon > 0.0 && epsilon < std::f64::consts::PI) {
        return Err(Error::Domain(format!("epsilon must lie in (0, π), got {epsilon}")));
    }
    if n < 2 {
        return Err(Error::Domain("N must be at least 2".into()));
    }
    if !grid_size.is_power_of_two() || grid_size < (1 << 14) {
        return Err(Error::Domain(format!(
            "grid_size must be a power of two ≥ 16384, got {grid_size}"
        )));
    }
    let a = bump_normalization();
    let omega_max = n as f64 * epsilon / 2.0;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_b0b5);
    let probes: Vec<f64> = (0..CHECK_POINTS).map(|_| rng.gen_range(0.0..omega_max)).collect();
    let reference: Vec<f64> = probes
        .iter()
        .map(|w| bump_transform_direct(*w, a, 2 * grid_size))
        .collect();

    let mut padding = MIN_PADDING;
    let (table, padding) = loop {
        let table = TransformTable::build(a, grid_size, padding, omega_max);
        let residual = probes
            .iter()
            .zip(&reference)
            .map(|(w, r)| (table.eval(*w) - r).abs())
            .fold(0.0, f64::max);
        if residual <= RESIDUAL_LIMIT {
            break (table, padding);
        }
        if padding >= MAX_PADDING {
            return Err(Error::Numerical(format!(
                "grid too coarse: transform residual {residual:.3e} exceeds {RESIDUAL_LIMIT:e}"
            )));
        }
        padding *= 2;
    };

    let c = (2.0 / std::f64::consts::PI).sqrt();
    let coefficients = (1..n)
        .map(|k| {
            let half = k as f64 * epsilon / 2.0;
            c * table.eval(half) * half.sin() / k as f64
        })
        .collect();
    Ok(QeeaFourierSpec {
        epsilon,
        n,
        coefficients,
        alpha: DEFAULT_ALPHA,
        m: bin_count(DEFAULT_ALPHA, epsilon),
        normalization_constant: a,
        padding,
    })
}
