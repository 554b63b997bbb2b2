//! Time-averaged autocorrelation of a series.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `C(τ)` for lags `1..=max_lag`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocorrCurve<F> {
    pub lags: Vec<usize>,
    pub values: Vec<F>,
}

impl<F: Real> AutocorrCurve<F> {
    pub fn max_lag(&self) -> usize {
        self.lags.last().copied().unwrap_or(0)
    }

    pub fn at(&self, lag: usize) -> Option<F> {
        self.lags
            .iter()
            .position(|&l| l == lag)
            .map(|k| self.values[k])
    }

    /// Mean of `C(τ)` over `first..=last`.
    pub fn mean_over(&self, first: usize, last: usize) -> Option<F> {
        let picked: Vec<F> = self
            .lags
            .iter()
            .zip(&self.values)
            .filter(|(&l, _)| (first..=last).contains(&l))
            .map(|(_, &v)| v)
            .collect();
        if picked.is_empty() {
            None
        } else {
            Some(picked.iter().copied().sum::<F>() / F::of_usize(picked.len()))
        }
    }
}

/// Lagged-product average `⟨x(t) x(t-τ)⟩` over the `N - τ` available pairs.
pub fn lagged_moment<F: Real>(series: &[F], lag: usize) -> F {
    let pairs = series.len() - lag;
    let sum: F = series[lag..].iter().zip(series).map(|(&a, &b)| a * b).sum();
    sum / F::of_usize(pairs)
}

struct Moments<F> {
    mean_sq: F,
    variance: F,
}

fn moments<F: Real>(series: &[F]) -> Result<Moments<F>> {
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteSample);
    }
    let n = F::of_usize(series.len());
    let mean = series.iter().copied().sum::<F>() / n;
    let centered = series.iter().map(|&x| (x - mean) * (x - mean)).sum::<F>() / n;
    let scale = series.iter().map(|&x| x * x).sum::<F>() / n;
    if centered <= F::epsilon() * F::of(16.0) * scale || centered == F::zero() {
        return Err(Error::ZeroVariance);
    }
    let mean_sq = mean * mean;
    Ok(Moments {
        mean_sq,
        variance: lagged_moment(series, 0) - mean_sq,
    })
}

/// `C(τ) = (⟨x(t) x(t-τ)⟩ - ⟨x⟩²) / Var(x)` with the lagged average taken
/// over `N - τ` pairs and the mean and variance over the whole series.
/// `C(0) = 1` exactly.
pub fn autocorrelation_at<F: Real>(series: &[F], lag: usize) -> Result<F> {
    if lag + 1 >= series.len() {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            max_lag: lag,
        });
    }
    let m = moments(series)?;
    Ok((lagged_moment(series, lag) - m.mean_sq) / m.variance)
}

pub fn autocorrelation<F: Real>(series: &[F], max_lag: usize) -> Result<AutocorrCurve<F>> {
    if series.len() <= max_lag + 1 {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            max_lag,
        });
    }
    let m = moments(series)?;
    let lags: Vec<usize> = (1..=max_lag).collect();
    let values = lags
        .iter()
        .map(|&lag| (lagged_moment(series, lag) - m.mean_sq) / m.variance)
        .collect();
    Ok(AutocorrCurve { lags, values })
}

/// Unnormalized relaxation `R(τ) = ⟨x(t) x(t-τ)⟩` for lags `1..=max_lag`.
pub fn relaxation<F: Real>(series: &[F], max_lag: usize) -> Result<AutocorrCurve<F>> {
    if series.len() <= max_lag + 1 {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            max_lag,
        });
    }
    let lags: Vec<usize> = (1..=max_lag).collect();
    let values = lags.iter().map(|&lag| lagged_moment(series, lag)).collect();
    Ok(AutocorrCurve { lags, values })
}

/// Absolute values, for volatility autocorrelation.
pub fn absolute<F: Real>(series: &[F]) -> Vec<F> {
    series.iter().map(|x| x.abs()).collect()
}
