//! Exponentially scaled modified Bessel functions of the first kind.
//!
//! Only the sequence `e^{-x} I_j(x)` for `j = 0..=j_max` and `x > 0` is
//! needed. Ratios `I_j / I_{j-1}` come from backward recurrence and the
//! sequence is anchored on `e^{-x} I_0(x)`, so nothing overflows even for
//! `x` around 10⁶.

use crate::error::{Error, Result};

/// Above this argument `e^{-x} I_0` is taken from its asymptotic expansion.
const ASYMPTOTIC_THRESHOLD: f64 = 20.0;

/// `e^{-x} I_0(x)` for `x ≥ 0`.
pub fn scaled_i0(x: f64) -> f64 {
    if x <= ASYMPTOTIC_THRESHOLD {
        // Σ (x²/4)^m / (m!)², all terms positive
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut m: f64 = 1.0;
        loop {
            term *= q / (m * m);
            sum += term;
            if term < sum * 1e-18 {
                break;
            }
            m += 1.0;
        }
        sum * (-x).exp()
    } else {
        // 1/√(2πx) Σ ((2m-1)!!)² / (m! (8x)^m), truncated at its smallest term
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut m: f64 = 1.0;
        loop {
            let next = term * (2.0 * m - 1.0).powi(2) / (8.0 * m * x);
            if next >= term || next < sum * 1e-17 {
                if next < term {
                    sum += next;
                }
                break;
            }
            term = next;
            sum += term;
            m += 1.0;
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

/// `log(e^{-x} I_j(x))` for `j = 0..=j_max`.
pub fn log_scaled_bessel_i(x: f64, j_max: usize) -> Result<Vec<f64>> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("Bessel argument must be positive, got {x}")));
    }
    // I_{k-1} = I_{k+1} + (2k/x) I_k  ⇒  r_k = I_k/I_{k-1} = 1/(2k/x + r_{k+1})
    let start = j_max + 30 + (10.0 * x.sqrt()).ceil() as usize;
    let mut ratios = vec![0.0; j_max + 1];
    let mut r = 0.0;
    for k in (1..=start).rev() {
        r = 1.0 / (2.0 * k as f64 / x + r);
        if k <= j_max {
            ratios[k] = r;
        }
    }
    let mut out = Vec::with_capacity(j_max + 1);
    let mut acc = scaled_i0(x).ln();
    out.push(acc);
    for &ratio in ratios.iter().skip(1) {
        acc += ratio.ln();
        out.push(acc);
    }
    Ok(out)
}

/// `e^{-x} I_j(x)` for `j = 0..=j_max`; fails rather than return zeros.
pub fn scaled_bessel_i(x: f64, j_max: usize) -> Result<Vec<f64>> {
    let logs = log_scaled_bessel_i(x, j_max)?;
    let vals: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    if let Some(j) = vals.iter().position(|v| !v.is_normal()) {
        return Err(Error::Numerical(format!(
            "e^-x I_{j}({x}) underflows double precision"
        )));
    }
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Positive-term series Σ (x/2)^{2m+j} / (m! (m+j)!) scaled by e^{-x}.
    fn series_oracle(x: f64, j: usize) -> f64 {
        let h = 0.5 * x;
        let mut lead = (-x).exp();
        for i in 1..=j {
            lead *= h / i as f64;
        }
        let mut term = lead;
        let mut sum = lead;
        let mut m: f64 = 1.0;
        while term > sum * 1e-19 {
            term *= h * h / (m * (m + j as f64));
            sum += term;
            m += 1.0;
        }
        sum
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn matches_reference_values() {
        let cases = [
            (10.0, 0, 0.127_833_337_163_428_6),
            (10.0, 1, 0.121_262_681_384_455_52),
            (10.0, 3, 0.079_830_361_029_840_52),
            (30.0, 7, 0.031_998_844_001_460_05),
            (50.0, 30, 8.245_393_352_089_968e-6),
            (1e3, 0, 0.012_617_240_455_891_257),
            (1e3, 50, 0.003_613_581_892_594_122_5),
            (1e5, 0, 0.001_261_567_837_976_776_8),
            (1e5, 1000, 8.500_518_899_870_589e-6),
            (1e6, 5000, 1.486_749_125_341_972_3e-9),
        ];
        for (x, j, want) in cases {
            let got = scaled_bessel_i(x, j).unwrap()[j];
            assert!(rel(got, want) < 1e-12, "x={x} j={j}: {got} vs {want}");
        }
    }

    #[test]
    fn agrees_with_series_below_thirty() {
        for &x in &[0.5, 1.0, 3.7, 10.0, 19.9, 20.1, 25.0, 30.0] {
            let vals = scaled_bessel_i(x, 40).unwrap();
            for (j, v) in vals.iter().enumerate() {
                let want = series_oracle(x, j);
                assert!(rel(*v, want) < 1e-10, "x={x} j={j}: {v} vs {want}");
            }
        }
    }

    #[test]
    fn generating_function_sum_is_one() {
        // e^{-x}(I_0 + 2 Σ_{k≥1} I_k) = 1
        for &x in &[25.0f64, 700.0, 1e4, 1e6] {
            let n = (x.sqrt() * 40.0) as usize + 50;
            let logs = log_scaled_bessel_i(x, n).unwrap();
            let s: f64 = logs[0].exp() + 2.0 * logs[1..].iter().map(|l| l.exp()).sum::<f64>();
            assert!((s - 1.0).abs() < 1e-12, "x={x}: {s}");
        }
    }

    #[test]
    fn continuity_at_threshold() {
        let a = scaled_i0(ASYMPTOTIC_THRESHOLD);
        let b = scaled_i0(ASYMPTOTIC_THRESHOLD * (1.0 + 1e-12));
        assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn underflow_is_an_error() {
        assert!(matches!(scaled_bessel_i(1.0, 400), Err(Error::Numerical(_))));
        assert!(log_scaled_bessel_i(-1.0, 3).is_err());
    }
}
