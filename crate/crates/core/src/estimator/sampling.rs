//! Drawing Fourier indices from an importance distribution.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fourier::ImportanceDistribution;

/// N_S i.i.d. draws; returns n_k aligned with `dist.ks`.
pub fn draw_samples<R: Rng>(dist: &ImportanceDistribution, n_samples: usize, rng: &mut R) -> Result<Vec<usize>> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("N_S must be at least 1".into()));
    }
    if dist.is_empty() {
        return Err(Error::InvalidArgument("empty importance distribution".into()));
    }
    Ok(dist.sample_counts(n_samples, rng))
}

/// The multiset of drawn k values in ascending order.
pub fn expand_samples(dist: &ImportanceDistribution, counts: &[usize]) -> Vec<u64> {
    dist.ks
        .iter()
        .zip(counts)
        .flat_map(|(&k, &c)| std::iter::repeat_n(k, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{cdf_importance, wan_coefficients};
    use rand::SeedableRng;

    #[test]
    fn single_support() {
        let dist = ImportanceDistribution::from_signed(vec![7], &[0.3]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let c = draw_samples(&dist, 50, &mut rng).unwrap();
        assert_eq!(c, vec![50]);
        assert_eq!(expand_samples(&dist, &c), vec![7; 50]);
    }

    #[test]
    fn counts_sum_to_n() {
        let dist = cdf_importance(&wan_coefficients(100.0, 40).unwrap());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let c = draw_samples(&dist, 1234, &mut rng).unwrap();
        assert_eq!(c.iter().sum::<usize>(), 1234);
        let ks = expand_samples(&dist, &c);
        assert_eq!(ks.len(), 1234);
        assert!(ks.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn zero_samples_rejected() {
        let dist = ImportanceDistribution::from_signed(vec![1], &[1.0]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        assert!(draw_samples(&dist, 0, &mut rng).is_err());
    }
}
