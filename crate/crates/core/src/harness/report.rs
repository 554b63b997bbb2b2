//! Single-run stylized-facts reports.

use crate::dynamics::{simulate, FieldMode};
use crate::error::Result;
use crate::harness::history::HistoricalSeries;
use crate::lattice::SimConfig;
use crate::stats::{
    absolute, autocorrelation, clustering_series, excess_kurtosis, fit_power_law,
    freedman_diaconis_bins, histogram_on, ks_two_sample, relaxation, AutocorrCurve,
    ClusteringSeries, KsResult, LagRange, PowerLawFit,
};

/// Largest volatility-autocorrelation lag reported and fitted.
pub const DEFAULT_MAX_LAG: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub max_lag: usize,
    pub fit_range: LagRange,
    /// Histogram bins; Freedman–Diaconis when `None`.
    pub bins: Option<usize>,
    pub mode: FieldMode,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            max_lag: DEFAULT_MAX_LAG,
            fit_range: LagRange::new(1, DEFAULT_MAX_LAG),
            bins: None,
            mode: FieldMode::SpinWeighted,
        }
    }
}

/// Diagnostics of one return series. Pieces that the series is too short or
/// too degenerate for are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFacts {
    pub returns: Vec<f64>,
    pub excess_kurtosis: Option<f64>,
    /// Volatility autocorrelation `C(τ)` of `|r|`.
    pub autocorr: Option<AutocorrCurve<f64>>,
    pub fit: Option<PowerLawFit<f64>>,
    /// Fit of the unnormalized lagged moment `⟨|r(t)| |r(t-τ)|⟩`.
    pub raw_fit: Option<PowerLawFit<f64>>,
    pub clustering: ClusteringSeries<f64>,
}

impl SeriesFacts {
    pub fn compute(returns: &[f64], opts: &AnalysisOptions) -> Self {
        let vol = absolute(returns);
        // short runs get a proportionally shorter curve
        let max_lag = opts.max_lag.min(returns.len().saturating_sub(2));
        let autocorr = if max_lag >= 1 {
            autocorrelation(&vol, max_lag).ok()
        } else {
            None
        };
        let fit = autocorr
            .as_ref()
            .and_then(|c| fit_power_law(c, opts.fit_range).ok());
        let raw_fit = if max_lag >= 1 {
            relaxation(&vol, max_lag)
                .ok()
                .and_then(|c| fit_power_law(&c, opts.fit_range).ok())
        } else {
            None
        };
        SeriesFacts {
            returns: returns.to_vec(),
            excess_kurtosis: excess_kurtosis(returns).ok(),
            autocorr,
            fit,
            raw_fit,
            clustering: clustering_series(returns),
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        self.fit.map(|f| f.gamma)
    }
}

/// Histograms of the available series over shared bins.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramSet {
    pub edges: Vec<f64>,
    pub simulated: Option<(Vec<usize>, Vec<f64>)>,
    pub historical: Option<(Vec<usize>, Vec<f64>)>,
}

impl HistogramSet {
    fn build(sim: Option<&[f64]>, hist: Option<&[f64]>, bins: Option<usize>) -> Option<Self> {
        let all: Vec<f64> = sim.into_iter().chain(hist).flatten().copied().collect();
        if all.is_empty() {
            return None;
        }
        let lead = sim.filter(|s| !s.is_empty()).or(hist)?;
        let bins = match bins {
            Some(b) => b,
            None => freedman_diaconis_bins(lead).ok()?,
        };
        let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, lo + 0.5)
        };
        let one = |x: &[f64]| {
            histogram_on(x, lo, hi, bins)
                .ok()
                .map(|h| (h.edges, h.counts, h.densities))
        };
        let sim_h = sim.filter(|s| !s.is_empty()).and_then(one);
        let hist_h = hist.filter(|s| !s.is_empty()).and_then(one);
        let edges = sim_h.as_ref().or(hist_h.as_ref())?.0.clone();
        Some(HistogramSet {
            edges,
            simulated: sim_h.map(|(_, c, d)| (c, d)),
            historical: hist_h.map(|(_, c, d)| (c, d)),
        })
    }
}

/// Everything one run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct StylizedFactsReport {
    /// Echo of the configuration that produced `simulated`.
    pub config: Option<SimConfig>,
    pub mode: FieldMode,
    pub simulated: Option<SeriesFacts>,
    pub historical: Option<SeriesFacts>,
    /// Simulated vs historical returns.
    pub ks: Option<KsResult>,
    pub histogram: Option<HistogramSet>,
    pub max_lag: usize,
}

impl StylizedFactsReport {
    pub fn seed(&self) -> Option<u64> {
        self.config.as_ref().map(|c| c.seed)
    }
}

/// Simulates `config` and compares it with `history` when given.
pub fn run_single(
    config: &SimConfig,
    history: Option<&HistoricalSeries>,
    opts: &AnalysisOptions,
) -> Result<StylizedFactsReport> {
    let prices = simulate::<f64>(config, opts.mode)?;
    let returns = prices.returns();
    let simulated = SeriesFacts::compute(&returns, opts);
    let historical = history.map(|h| SeriesFacts::compute(&h.returns, opts));
    let ks = match history {
        Some(h) if !returns.is_empty() && !h.returns.is_empty() => {
            Some(ks_two_sample(&returns, &h.returns)?)
        }
        _ => None,
    };
    let histogram = HistogramSet::build(
        Some(&returns),
        history.map(|h| h.returns.as_slice()),
        opts.bins,
    );
    Ok(StylizedFactsReport {
        config: Some(config.clone()),
        mode: opts.mode,
        simulated: Some(simulated),
        historical,
        ks,
        histogram,
        max_lag: opts.max_lag,
    })
}

/// Stylized facts of historical returns alone.
pub fn analyze_history(history: &HistoricalSeries, opts: &AnalysisOptions) -> StylizedFactsReport {
    StylizedFactsReport {
        config: None,
        mode: opts.mode,
        simulated: None,
        historical: Some(SeriesFacts::compute(&history.returns, opts)),
        ks: None,
        histogram: HistogramSet::build(None, Some(&history.returns), opts.bins),
        max_lag: opts.max_lag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_run_without_history() {
        let config = SimConfig {
            steps: 10,
            lattice_side: 8,
            ..SimConfig::default()
        };
        let report = run_single(&config, None, &AnalysisOptions::default()).unwrap();
        let sim = report.simulated.as_ref().unwrap();
        assert_eq!(sim.returns.len(), 9);
        assert!(report.ks.is_none());
        assert!(report.historical.is_none());
        assert_eq!(report.seed(), Some(config.seed));
    }

    #[test]
    fn shared_histogram_bins() {
        let h = HistogramSet::build(Some(&[0.0, 1.0, 2.0]), Some(&[-1.0, 0.5]), Some(4)).unwrap();
        assert_eq!(h.edges.first(), Some(&-1.0));
        assert_eq!(h.edges.last(), Some(&2.0));
        let width = h.edges[1] - h.edges[0];
        for (_, d) in [h.simulated.unwrap(), h.historical.unwrap()] {
            assert!((d.iter().sum::<f64>() * width - 1.0).abs() < 1e-12);
        }
    }
}
