//! Stylized-facts diagnostics: distribution comparison, volatility
//! autocorrelation and its power-law decay, histograms and clustering tracks.

pub mod autocorr;
pub mod histogram;
pub mod ks;
pub mod powerlaw;

pub use autocorr::{
    absolute, autocorrelation, autocorrelation_at, lagged_moment, relaxation, AutocorrCurve,
};
pub use histogram::{freedman_diaconis_bins, histogram, histogram_on, Histogram};
pub use ks::{
    kolmogorov_survival, ks_p_value, ks_statistic, ks_two_sample, EmpiricalCdf, KsResult,
};
pub use powerlaw::{fit_power_law, LagRange, PowerLawFit, MIN_FIT_POINTS};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn mean<F: Real>(x: &[F]) -> Result<F> {
    if x.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(x.iter().copied().sum::<F>() / F::of_usize(x.len()))
}

/// Population variance.
pub fn variance<F: Real>(x: &[F]) -> Result<F> {
    let m = mean(x)?;
    Ok(x.iter().map(|&v| (v - m) * (v - m)).sum::<F>() / F::of_usize(x.len()))
}

/// `m4 / m2² - 3`; zero for a Gaussian.
pub fn excess_kurtosis<F: Real>(x: &[F]) -> Result<F> {
    let m = mean(x)?;
    let n = F::of_usize(x.len());
    let m2 = x.iter().map(|&v| (v - m).powi(2)).sum::<F>() / n;
    if m2 == F::zero() {
        return Err(Error::ZeroVariance);
    }
    let m4 = x.iter().map(|&v| (v - m).powi(4)).sum::<F>() / n;
    Ok(m4 / (m2 * m2) - F::of(3.0))
}

/// Raw and absolute return tracks for clustering plots.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringSeries<F> {
    pub returns: Vec<F>,
    pub abs_returns: Vec<F>,
}

pub fn clustering_series<F: Real>(returns: &[F]) -> ClusteringSeries<F> {
    ClusteringSeries {
        returns: returns.to_vec(),
        abs_returns: absolute(returns),
    }
}

/// Gaussian sample with the mean and variance of `x`, same length.
pub fn matched_gaussian<F: Real>(x: &[F], seed: u64) -> Result<Vec<F>> {
    let m = mean(x)?.as_f64();
    let sd = variance(x)?.as_f64().sqrt();
    let normal = Normal::new(m, sd).map_err(|_| Error::ZeroVariance)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..x.len())
        .map(|_| F::of(normal.sample(&mut rng)))
        .collect())
}

/// Seeded uniform random permutation.
pub fn shuffled<F: Real>(x: &[F], seed: u64) -> Vec<F> {
    let mut out = x.to_vec();
    out.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    out
}

/// Mean volatility autocorrelation over lags `1..=max_lag`.
pub fn mean_volatility_autocorrelation<F: Real>(returns: &[F], max_lag: usize) -> Result<F> {
    let curve = autocorrelation(&absolute(returns), max_lag)?;
    Ok(curve.mean_over(1, max_lag).expect("non-empty lag range"))
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;

    #[test]
    fn clustering_tracks() {
        let c = clustering_series(&[0.01_f64; 5]);
        assert!(c.abs_returns.iter().all(|&v| v == 0.01));
        let x = [0.02, -0.01, 0.03, -0.04];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(
            clustering_series(&x).abs_returns,
            clustering_series(&neg).abs_returns
        );
    }

    #[test]
    fn shuffle_destroys_volatility_clustering() {
        // regime-switching volatility: long calm and turbulent stretches
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..20_000)
            .map(|t| {
                let scale = if (t / 500) % 2 == 0 { 0.005 } else { 0.03 };
                scale * (rng.random::<f64>() - 0.5)
            })
            .collect();
        let before = mean_volatility_autocorrelation(&x, 50).unwrap();
        let after = mean_volatility_autocorrelation(&shuffled(&x, 9), 50).unwrap();
        assert!(before > 0.2 && after.abs() < 0.05, "{before} {after}");
    }

    #[test]
    fn kurtosis_of_uniform() {
        let x: Vec<f64> = (0..10_001).map(|k| k as f64).collect();
        // uniform: -6/5
        assert!((excess_kurtosis(&x).unwrap() + 1.2).abs() < 1e-3);
        assert!(excess_kurtosis(&[1.0; 4]).is_err());
    }

    #[test]
    fn matched_gaussian_moments() {
        let x: Vec<f64> = (0..50_000)
            .map(|k| ((k % 17) as f64 - 8.0) * 0.01)
            .collect();
        let g = matched_gaussian(&x, 4).unwrap();
        assert_eq!(g.len(), x.len());
        assert!((mean(&g).unwrap() - mean(&x).unwrap()).abs() < 1e-3);
        assert!((variance(&g).unwrap() / variance(&x).unwrap() - 1.0).abs() < 0.03);
    }
}
