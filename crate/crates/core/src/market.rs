//! Price formation from the demand/supply tally and the resulting series.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Append-only price history, `prices[0]` being the initial price.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries<F> {
    prices: Vec<F>,
    log_prices: Vec<F>,
}

impl<F: Real> PriceSeries<F> {
    pub fn new(initial_price: F) -> Result<Self> {
        check_price(0, initial_price)?;
        Ok(PriceSeries {
            prices: vec![initial_price],
            log_prices: vec![initial_price.ln()],
        })
    }

    pub fn push(&mut self, price: F) -> Result<()> {
        check_price(self.prices.len(), price)?;
        self.prices.push(price);
        self.log_prices.push(price.ln());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn prices(&self) -> &[F] {
        &self.prices
    }

    pub fn last(&self) -> F {
        *self.prices.last().expect("series holds the initial price")
    }

    pub fn get(&self, step: usize) -> Option<F> {
        self.prices.get(step).copied()
    }

    pub(crate) fn ln_at(&self, step: usize) -> F {
        self.log_prices[step]
    }

    /// `returns[t] = ln(P(t+1) / P(t))`; one shorter than the price series.
    pub fn returns(&self) -> Vec<F> {
        self.prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect()
    }
}

fn check_price<F: Real>(step: usize, price: F) -> Result<()> {
    if price.is_finite() && price > F::zero() {
        Ok(())
    } else {
        Err(Error::BadPrice {
            step,
            price: price.as_f64(),
        })
    }
}

/// Next price from the previous one and the demand `D` / supply `S` counts:
/// `P_prev * (D/S)^κ` with `κ = α (D+S)/n`. An empty side or a balanced book
/// leaves the price unchanged.
pub fn clear_price<F: Real>(
    p_prev: F,
    demand: usize,
    supply: usize,
    agents: usize,
    alpha: F,
) -> Result<F> {
    check_price(0, p_prev)?;
    if demand + supply > agents {
        return Err(Error::BadTally {
            demand,
            supply,
            agents,
        });
    }
    if !(alpha.is_finite() && alpha > F::zero()) {
        return Err(Error::config(format!("alpha = {alpha} must be > 0")));
    }
    if demand == 0 || supply == 0 || demand == supply {
        return Ok(p_prev);
    }
    let kappa = alpha * F::of_usize(demand + supply) / F::of_usize(agents);
    let ratio = F::of_usize(demand) / F::of_usize(supply);
    Ok(p_prev * ratio.powf(kappa))
}

/// `ln(P_now / P_then)`.
pub fn log_return<F: Real>(p_now: F, p_then: F) -> Result<F> {
    check_price(1, p_now)?;
    check_price(0, p_then)?;
    Ok((p_now / p_then).ln())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn balanced_book_keeps_price() {
        assert_eq!(clear_price(100.0, 100, 100, 1000, 2.5).unwrap(), 100.0);
    }

    #[test]
    fn two_to_one_demand() {
        // κ = 0.3, 100 * 2^0.3
        let p = clear_price(100.0_f64, 200, 100, 1000, 1.0).unwrap();
        assert!((p - 123.114_441_334_491_6).abs() < 1e-9, "{p}");
    }

    #[test]
    fn empty_side_guard() {
        assert_eq!(clear_price(100.0, 0, 500, 1000, 1.0).unwrap(), 100.0);
        assert_eq!(clear_price(100.0, 500, 0, 1000, 1.0).unwrap(), 100.0);
    }

    #[test]
    fn full_participation_has_unit_exponent() {
        // κ = 1 so the price scales by exactly D/S
        let p = clear_price(100.0_f64, 750, 250, 1000, 1.0).unwrap();
        assert!((p - 300.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(clear_price(0.0_f64, 1, 1, 10, 1.0).is_err());
        assert!(clear_price(1.0_f64, 6, 5, 10, 1.0).is_err());
        assert!(log_return(-1.0_f64, 1.0).is_err());
    }

    #[test]
    fn log_return_values() {
        assert_eq!(log_return(5.0_f64, 5.0).unwrap(), 0.0);
        assert!((log_return(110.0_f64, 100.0).unwrap() - 0.095_310_179_804_324_9).abs() < 1e-15);
    }

    #[test]
    fn series_returns_shape() {
        let mut s = PriceSeries::new(100.0_f64).unwrap();
        s.push(110.0).unwrap();
        s.push(99.0).unwrap();
        assert_eq!(s.returns().len(), 2);
        assert!(s.push(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn log_return_antisymmetric(a in 1e-6_f64..1e6, b in 1e-6_f64..1e6) {
            let ab = log_return(a, b).unwrap();
            let ba = log_return(b, a).unwrap();
            prop_assert!((ab + ba).abs() <= 1e-12 * ab.abs().max(1.0));
        }

        #[test]
        fn price_stays_positive(p in 1e-3_f64..1e6, d in 0usize..500, s in 0usize..500, alpha in 0.01_f64..5.0) {
            let out = clear_price(p, d, s, 1000, alpha).unwrap();
            prop_assert!(out > 0.0 && out.is_finite());
        }
    }
}
