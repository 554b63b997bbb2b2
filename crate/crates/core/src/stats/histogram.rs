//! Equal-width histograms normalized to unit area.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram<F> {
    /// `bins + 1` ascending edges.
    pub edges: Vec<F>,
    pub counts: Vec<usize>,
    /// `count / (n * width)`; integrates to 1.
    pub densities: Vec<F>,
}

impl<F: Real> Histogram<F> {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> F {
        self.edges[1] - self.edges[0]
    }

    pub fn integral(&self) -> F {
        self.densities.iter().copied().sum::<F>() * self.width()
    }
}

fn finite_range<F: Real>(samples: &[F]) -> Result<(F, F)> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut lo = F::infinity();
    let mut hi = F::neg_infinity();
    for &x in samples {
        if !x.is_finite() {
            return Err(Error::NonFiniteSample);
        }
        lo = lo.min(x);
        hi = hi.max(x);
    }
    Ok((lo, hi))
}

/// `bin_count` equal-width bins spanning `[min, max]` of the samples. A
/// degenerate sample puts everything in one bin of a unit-wide span.
pub fn histogram<F: Real>(samples: &[F], bin_count: usize) -> Result<Histogram<F>> {
    let (lo, hi) = finite_range(samples)?;
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        (lo - F::of(0.5), lo + F::of(0.5))
    };
    histogram_on(samples, lo, hi, bin_count)
}

/// Equal-width bins over a caller-chosen span; samples outside are dropped
/// from the counts but still count toward `n` so that shared bins compare.
pub fn histogram_on<F: Real>(
    samples: &[F],
    lo: F,
    hi: F,
    bin_count: usize,
) -> Result<Histogram<F>> {
    if bin_count < 2 {
        return Err(Error::TooFewBins(bin_count));
    }
    finite_range(samples)?;
    let bins = F::of_usize(bin_count);
    let width = (hi - lo) / bins;
    let edges: Vec<F> = (0..=bin_count)
        .map(|k| {
            if k == bin_count {
                hi
            } else {
                lo + width * F::of_usize(k)
            }
        })
        .collect();
    let mut counts = vec![0usize; bin_count];
    for &x in samples {
        if x < lo || x > hi {
            continue;
        }
        let k = ((x - lo) / width)
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(bin_count - 1);
        counts[k] += 1;
    }
    let norm = F::of_usize(samples.len()) * width;
    let densities = counts.iter().map(|&c| F::of_usize(c) / norm).collect();
    Ok(Histogram {
        edges,
        counts,
        densities,
    })
}

/// Linear-interpolated quantile of sorted data.
fn quantile<F: Real>(sorted: &[F], q: f64) -> F {
    let pos = q * (sorted.len() - 1) as f64;
    let below = pos.floor() as usize;
    let above = pos.ceil() as usize;
    let frac = F::of(pos - below as f64);
    sorted[below] + (sorted[above] - sorted[below]) * frac
}

/// Freedman–Diaconis bin count, `range / (2 IQR n^{-1/3})`, clamped to `[2, 1000]`.
/// Falls back to `√n` bins when the interquartile range vanishes.
pub fn freedman_diaconis_bins<F: Real>(samples: &[F]) -> Result<usize> {
    let (lo, hi) = finite_range(samples)?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let n = samples.len() as f64;
    let bins = if iqr > F::zero() && hi > lo {
        let h = 2.0 * iqr.as_f64() * n.powf(-1.0 / 3.0);
        ((hi - lo).as_f64() / h).ceil()
    } else {
        n.sqrt().ceil()
    };
    Ok((bins as usize).clamp(2, 1000))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    use super::*;
    use crate::stats::excess_kurtosis;

    #[test]
    fn identical_samples_single_bin() {
        let h = histogram(&[3.0; 10], 5).unwrap();
        assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert!((h.integral() - 1.0_f64).abs() < 1e-12);
    }

    #[test]
    fn densities_integrate_to_one() {
        let x: Vec<f64> = (0..997)
            .map(|k| ((k * 7919) % 1000) as f64 / 13.0)
            .collect();
        for bins in [2, 10, 37, 100] {
            let h = histogram(&x, bins).unwrap();
            assert_eq!(h.counts.iter().sum::<usize>(), x.len());
            assert!((h.integral() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn max_lands_in_last_bin() {
        let h = histogram(&[0.0, 1.0, 2.0], 2).unwrap();
        assert_eq!(h.counts, vec![1, 2]);
    }

    #[test]
    fn errors() {
        assert!(matches!(histogram::<f64>(&[], 4), Err(Error::EmptySample)));
        assert!(matches!(histogram(&[1.0], 1), Err(Error::TooFewBins(1))));
    }

    #[test]
    fn gaussian_sample_has_no_excess_kurtosis() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..1_000_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let h = histogram(&x, 100).unwrap();
        assert!((h.integral() - 1.0).abs() < 1e-12);
        assert!(excess_kurtosis(&x).unwrap().abs() < 0.05);
    }

    #[test]
    fn freedman_diaconis_reasonable() {
        let x: Vec<f64> = (0..1000).map(|k| k as f64).collect();
        // IQR 499.5, h = 99.9, range 999: ten bins up to rounding
        assert!((10..=11).contains(&freedman_diaconis_bins(&x).unwrap()));
        assert_eq!(freedman_diaconis_bins(&[1.0; 16]).unwrap(), 4);
    }
}
