//! Two-sample Kolmogorov–Smirnov test on empirical CDFs.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sorted sample with step-function CDF `F(x) = #{s <= x} / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf<F> {
    sorted: Vec<F>,
}

impl<F: Real> EmpiricalCdf<F> {
    pub fn new(samples: &[F]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteSample);
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        Ok(EmpiricalCdf { sorted })
    }

    pub fn size(&self) -> usize {
        self.sorted.len()
    }

    pub fn sorted_samples(&self) -> &[F] {
        &self.sorted
    }

    /// Number of samples `<= x`.
    pub fn count_le(&self, x: F) -> usize {
        self.sorted.partition_point(|&s| s <= x)
    }

    pub fn eval(&self, x: F) -> F {
        F::of_usize(self.count_le(x)) / F::of_usize(self.size())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// Largest vertical distance between the two empirical CDFs.
    pub statistic: f64,
    pub p_value: f64,
    /// `n_x n_y / (n_x + n_y)`.
    pub effective_size: f64,
}

/// Largest CDF distance between two empirical distributions, found by
/// merging the sorted samples. Ties are consumed together on both sides.
pub fn ks_statistic<F: Real>(x: &EmpiricalCdf<F>, y: &EmpiricalCdf<F>) -> f64 {
    let (xs, ys) = (x.sorted_samples(), y.sorted_samples());
    let (nx, ny) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut best = 0u128;
    while i < nx && j < ny {
        let v = if xs[i] <= ys[j] { xs[i] } else { ys[j] };
        while i < nx && xs[i] <= v {
            i += 1;
        }
        while j < ny && ys[j] <= v {
            j += 1;
        }
        // |i/nx - j/ny| scaled by nx*ny, kept in integers
        let gap = (i as u128 * ny as u128).abs_diff(j as u128 * nx as u128);
        best = best.max(gap);
    }
    best as f64 / (nx as f64 * ny as f64)
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{k>=1} (-1)^{k-1} exp(-2 k² λ²)`.
///
/// Small λ switch to the equivalent theta-function form
/// `1 - √(2π)/λ Σ_{k odd} exp(-k² π² / (8 λ²))`, where the alternating series
/// converges too slowly.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda.is_nan() || lambda <= 0.0 {
        return 1.0;
    }
    let q = if lambda < 1.18 {
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        let mut k = 1.0_f64;
        loop {
            let term = (-k * k * c).exp();
            sum += term;
            // term underflows to 0 for tiny λ, where Q = 1
            if term == 0.0 || term < 1e-18 * sum {
                break;
            }
            k += 2.0;
        }
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for k in 1..=200 {
            let kf = f64::from(k);
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sum += sign * term;
            if term < 1e-18 {
                break;
            }
            sign = -sign;
        }
        2.0 * sum
    };
    q.clamp(0.0, 1.0)
}

/// Asymptotic p-value with the usual small-sample correction
/// `λ = (√n_e + 0.12 + 0.11/√n_e) D`.
pub fn ks_p_value(statistic: f64, effective_size: f64) -> f64 {
    let root = effective_size.sqrt();
    kolmogorov_survival((root + 0.12 + 0.11 / root) * statistic)
}

pub fn ks_two_sample<F: Real>(x: &[F], y: &[F]) -> Result<KsResult> {
    let fx = EmpiricalCdf::new(x)?;
    let fy = EmpiricalCdf::new(y)?;
    let statistic = ks_statistic(&fx, &fy);
    let (nx, ny) = (fx.size() as f64, fy.size() as f64);
    let effective_size = nx * ny / (nx + ny);
    Ok(KsResult {
        statistic,
        p_value: ks_p_value(statistic, effective_size),
        effective_size,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn identical_samples() {
        let x = [0.3, -1.0, 2.0, 2.0];
        let r = ks_two_sample(&x, &x).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn disjoint_supports() {
        let r = ks_two_sample(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(r.statistic, 1.0);
    }

    #[test]
    fn interleaved_by_hand() {
        // breakpoints 1, 1.5, 2: |1/2 - 0|, |1/2 - 1|, |1 - 1|
        let r = ks_two_sample(&[1.0, 2.0], &[1.5]).unwrap();
        assert_eq!(r.statistic, 0.5);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(
            ks_two_sample::<f64>(&[], &[1.0]),
            Err(Error::EmptySample)
        ));
        assert!(matches!(
            ks_two_sample(&[f64::NAN], &[1.0]),
            Err(Error::NonFiniteSample)
        ));
    }

    #[test]
    fn survival_reference_points() {
        // reference values from scipy.special.kolmogorov
        assert!((kolmogorov_survival(1.0) - 0.269_999_671_677_354_56).abs() < 1e-13);
        assert!((kolmogorov_survival(1.36) - 0.049_485_876_755_377_88).abs() < 1e-13);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
        assert!(kolmogorov_survival(10.0) < 1e-80);
    }

    #[test]
    fn both_branches_agree_at_switch() {
        let lo = kolmogorov_survival(1.18 - 1e-12);
        let hi = kolmogorov_survival(1.18);
        assert!((lo - hi).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn symmetric(x in prop::collection::vec(-5.0_f64..5.0, 1..30),
                     y in prop::collection::vec(-5.0_f64..5.0, 1..30)) {
            prop_assert_eq!(ks_two_sample(&x, &y).unwrap(), ks_two_sample(&y, &x).unwrap());
        }

        #[test]
        fn monotone_transform_keeps_statistic(x in prop::collection::vec(-3.0_f64..3.0, 1..30),
                                               y in prop::collection::vec(-3.0_f64..3.0, 1..30)) {
            let t = |v: &Vec<f64>| v.iter().map(|a| a.exp() * 2.0 + 1.0).collect::<Vec<_>>();
            let d0 = ks_two_sample(&x, &y).unwrap().statistic;
            let d1 = ks_two_sample(&t(&x), &t(&y)).unwrap().statistic;
            prop_assert_eq!(d0, d1);
        }

        #[test]
        fn survival_terminates_for_tiny_lambda(lambda in 1e-300_f64..1e-2) {
            prop_assert_eq!(kolmogorov_survival(lambda), 1.0);
        }

        #[test]
        fn p_value_decreasing_in_statistic(d1 in 0.0_f64..1.0, d2 in 0.0_f64..1.0, n in 1.0_f64..5000.0) {
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            let (p_lo, p_hi) = (ks_p_value(lo, n), ks_p_value(hi, n));
            prop_assert!(p_hi <= p_lo + 1e-15);
            prop_assert!((0.0..=1.0).contains(&p_hi));
        }
    }
}
