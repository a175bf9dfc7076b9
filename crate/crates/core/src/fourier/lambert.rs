//! Principal branch of the Lambert W function.

use crate::error::{Error, Result};

const INV_E: f64 = 0.367_879_441_171_442_33;

/// Solves `w e^w = x` on the principal branch, `x ≥ −1/e`.
pub fn lambert_w(x: f64) -> Result<f64> {
    if x.is_nan() || x < -INV_E - 1e-15 {
        return Err(Error::Domain(format!("lambert_w undefined for {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x <= -INV_E {
        return Ok(-1.0);
    }
    let mut w = if x > std::f64::consts::E {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    } else if x < -0.25 {
        // series about the branch point in p = √(2(ex + 1))
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        x.ln_1p()
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Plain Newton on w e^w = x started far away, as an independent check.
    fn newton_oracle(x: f64) -> f64 {
        let mut w = if x > 1.0 { x.ln() } else { 0.0 };
        for _ in 0..200 {
            let ew = w.exp();
            w -= (w * ew - x) / (ew * (w + 1.0));
        }
        w
    }

    #[test]
    fn known_values() {
        assert_eq!(lambert_w(0.0).unwrap(), 0.0);
        assert!((lambert_w(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        let w1 = lambert_w(1.0).unwrap();
        assert!((w1 - 0.567_143_290_409_783_8).abs() < 1e-15);
        assert!((w1 - newton_oracle(1.0)).abs() < 1e-14);
        let w = lambert_w(3.0 / (std::f64::consts::PI * 0.01)).unwrap();
        assert!((w - 3.350_071_037_862_551).abs() < 1e-13);
    }

    #[test]
    fn branch_point() {
        assert_eq!(lambert_w(-INV_E).unwrap(), -1.0);
        let w = lambert_w(-INV_E + 1e-10).unwrap();
        assert!((w + 1.0).abs() < 1e-4);
        assert!(lambert_w(-0.5).is_err());
        assert!(lambert_w(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn satisfies_defining_equation(x in -0.36f64..1e8) {
            let w = lambert_w(x).unwrap();
            prop_assert!(w >= -1.0);
            let back = w * w.exp();
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1e-3), "x={} w={} back={}", x, w, back);
        }
    }
}
