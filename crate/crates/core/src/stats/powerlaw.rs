//! Power-law decay fit `C(τ) ≈ A τ^{-γ}` by least squares in log-log space.

use serde::{Deserialize, Serialize};

use super::autocorr::AutocorrCurve;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MIN_FIT_POINTS: usize = 5;

/// Inclusive lag interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagRange {
    pub first: usize,
    pub last: usize,
}

impl LagRange {
    pub fn new(first: usize, last: usize) -> Self {
        LagRange { first, last }
    }

    pub fn contains(&self, lag: usize) -> bool {
        (self.first..=self.last).contains(&lag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit<F> {
    /// Decay exponent, the negated log-log slope.
    pub gamma: F,
    pub amplitude: F,
    pub fit_range: LagRange,
    pub r_squared: F,
    pub points_used: usize,
    /// Lags in range dropped because `C(τ) <= 0`.
    pub excluded: usize,
}

impl<F: Real> PowerLawFit<F> {
    pub fn predict(&self, lag: usize) -> F {
        self.amplitude * F::of_usize(lag).powf(-self.gamma)
    }
}

pub fn fit_power_law<F: Real>(
    curve: &AutocorrCurve<F>,
    fit_range: LagRange,
) -> Result<PowerLawFit<F>> {
    let mut excluded = 0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&lag, &c) in curve.lags.iter().zip(&curve.values) {
        if lag == 0 || !fit_range.contains(lag) {
            continue;
        }
        if c > F::zero() && c.is_finite() {
            xs.push(F::of_usize(lag).ln());
            ys.push(c.ln());
        } else {
            excluded += 1;
        }
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewFitPoints {
            needed: MIN_FIT_POINTS,
            found: xs.len(),
        });
    }

    let n = F::of_usize(xs.len());
    let mx = xs.iter().copied().sum::<F>() / n;
    let my = ys.iter().copied().sum::<F>() / n;
    let (mut sxx, mut sxy, mut syy) = (F::zero(), F::zero(), F::zero());
    for (&x, &y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: F = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = if syy > F::zero() {
        (F::one() - ss_res / syy).max(F::zero()).min(F::one())
    } else {
        F::one()
    };

    Ok(PowerLawFit {
        gamma: -slope,
        amplitude: intercept.exp(),
        fit_range,
        r_squared,
        points_used: xs.len(),
        excluded,
    })
}
