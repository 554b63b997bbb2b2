//! Parameter sweeps over the fundamentalist probability and the memory length.

use rayon::prelude::*;

use crate::error::Result;
use crate::harness::history::HistoricalSeries;
use crate::harness::output::csv_bytes;
use crate::harness::report::{run_single, AnalysisOptions};
use crate::lattice::SimConfig;

/// One `(p_fund, tau)` grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub p_fund: f64,
    pub tau: usize,
}

/// Published `(P_fund %, τ, p-value)` rows the sweep is compared against.
pub const TABLE1_REFERENCE: [(u32, usize, f64); 14] = [
    (60, 20, 0.998881),
    (60, 24, 0.999972),
    (60, 32, 0.986818),
    (70, 20, 0.999163),
    (70, 24, 0.999675),
    (70, 28, 0.999308),
    (70, 32, 0.999665),
    (80, 20, 0.999877),
    (80, 24, 0.999741),
    (80, 36, 0.999865),
    (80, 40, 0.999749),
    (90, 20, 0.999859),
    (90, 24, 0.999639),
    (90, 40, 0.988326),
];

pub fn table1_cells() -> Vec<SweepCell> {
    TABLE1_REFERENCE
        .iter()
        .map(|&(pct, tau, _)| SweepCell {
            p_fund: percent_to_probability(pct as f64),
            tau,
        })
        .collect()
}

/// Table-style percentages (60, 70, ...) to probabilities.
pub fn percent_to_probability(pct: f64) -> f64 {
    pct / 100.0
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replicate `replicate` in cell `(p_fund, tau)`; a stable hash of
/// all four inputs, kept within the non-negative `i64` range.
pub fn cell_seed(base_seed: u64, p_fund: f64, tau: usize, replicate: usize) -> u64 {
    let mut h = splitmix(base_seed);
    for word in [p_fund.to_bits(), tau as u64, replicate as u64] {
        h = splitmix(h ^ word);
    }
    h >> 1
}

/// Configuration of one replicate.
pub fn cell_config(base: &SimConfig, cell: SweepCell, replicate: usize) -> SimConfig {
    SimConfig {
        p_fund: cell.p_fund,
        tau: cell.tau,
        seed: cell_seed(base.seed, cell.p_fund, cell.tau, replicate),
        ..base.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateResult {
    pub p_value: f64,
    pub gamma: Option<f64>,
}

/// Runs one replicate against the historical returns.
pub fn run_replicate(
    base: &SimConfig,
    cell: SweepCell,
    replicate: usize,
    history: &HistoricalSeries,
    opts: &AnalysisOptions,
) -> Result<ReplicateResult> {
    let config = cell_config(base, cell, replicate);
    let report = run_single(&config, Some(history), opts)?;
    let p_value = report.ks.map(|k| k.p_value).unwrap_or(f64::NAN);
    Ok(ReplicateResult {
        p_value,
        gamma: report.simulated.and_then(|s| s.gamma()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p_fund: f64,
    pub tau: usize,
    /// Replicates that completed.
    pub seed_count: usize,
    pub failed: usize,
    pub median_p_value: Option<f64>,
    pub min_p_value: Option<f64>,
    pub max_p_value: Option<f64>,
    pub gamma_median: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

impl SweepRow {
    fn aggregate(cell: SweepCell, results: &[Result<ReplicateResult>]) -> Self {
        let ok: Vec<ReplicateResult> = results
            .iter()
            .filter_map(|r| r.as_ref().ok().copied())
            .filter(|r| r.p_value.is_finite())
            .collect();
        let p: Vec<f64> = ok.iter().map(|r| r.p_value).collect();
        let gammas: Vec<f64> = ok.iter().filter_map(|r| r.gamma).collect();
        SweepRow {
            p_fund: cell.p_fund,
            tau: cell.tau,
            seed_count: ok.len(),
            failed: results.len() - ok.len(),
            median_p_value: median(&p),
            min_p_value: p.iter().copied().reduce(f64::min),
            max_p_value: p.iter().copied().reduce(f64::max),
            gamma_median: median(&gammas),
        }
    }
}

impl SweepTable {
    /// Population standard deviation of the per-cell median p-values.
    pub fn median_p_value_std(&self) -> Option<f64> {
        let m: Vec<f64> = self.rows.iter().filter_map(|r| r.median_p_value).collect();
        if m.is_empty() {
            return None;
        }
        let mean = m.iter().sum::<f64>() / m.len() as f64;
        Some((m.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m.len() as f64).sqrt())
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let o = |x: Option<f64>| x.map(|v| format!("{v}")).unwrap_or_default();
        let rows = self.rows.iter().map(|r| {
            vec![
                format!("{}", r.p_fund),
                r.tau.to_string(),
                r.seed_count.to_string(),
                o(r.median_p_value),
                o(r.min_p_value),
                o(r.max_p_value),
                o(r.gamma_median),
                r.failed.to_string(),
            ]
        });
        csv_bytes(
            &[
                "p_fund",
                "tau",
                "seed_count",
                "median_p_value",
                "min_p_value",
                "max_p_value",
                "gamma_median",
                "failed",
            ],
            rows,
        )
    }
}

/// Runs `seeds_per_cell` replicates of every listed cell in parallel.
/// Rows come back sorted by `(p_fund, tau)`; a failing replicate is counted
/// in `failed` and does not abort the sweep.
pub fn run_sweep_cells(
    base: &SimConfig,
    cells: &[SweepCell],
    seeds_per_cell: usize,
    history: &HistoricalSeries,
    opts: &AnalysisOptions,
) -> SweepTable {
    let mut cells = cells.to_vec();
    cells.sort_by(|a, b| a.p_fund.total_cmp(&b.p_fund).then(a.tau.cmp(&b.tau)));
    cells.dedup();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..seeds_per_cell).map(move |r| (c, r)))
        .collect();
    let results: Vec<Result<ReplicateResult>> = jobs
        .par_iter()
        .map(|&(c, r)| run_replicate(base, cells[c], r, history, opts))
        .collect();
    let rows = cells
        .iter()
        .enumerate()
        .map(|(c, &cell)| {
            let chunk = &results[c * seeds_per_cell..(c + 1) * seeds_per_cell];
            SweepRow::aggregate(cell, chunk)
        })
        .collect();
    SweepTable { rows }
}

/// Full Cartesian sweep over `p_fund_values × tau_values`.
pub fn run_sweep(
    base: &SimConfig,
    p_fund_values: &[f64],
    tau_values: &[usize],
    seeds_per_cell: usize,
    history: &HistoricalSeries,
    opts: &AnalysisOptions,
) -> SweepTable {
    let cells: Vec<SweepCell> = p_fund_values
        .iter()
        .flat_map(|&p_fund| tau_values.iter().map(move |&tau| SweepCell { p_fund, tau }))
        .collect();
    run_sweep_cells(base, &cells, seeds_per_cell, history, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn cell_seeds_are_stable_and_distinct() {
        assert_eq!(cell_seed(1, 0.9, 24, 0), cell_seed(1, 0.9, 24, 0));
        let seeds: std::collections::BTreeSet<u64> = (0..8)
            .flat_map(|r| {
                [
                    cell_seed(1, 0.9, 24, r),
                    cell_seed(1, 0.8, 24, r),
                    cell_seed(1, 0.9, 20, r),
                ]
            })
            .collect();
        assert_eq!(seeds.len(), 24);
        assert!(seeds.iter().all(|&s| s <= i64::MAX as u64));
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn table1_shape() {
        let cells = table1_cells();
        assert_eq!(cells.len(), 14);
        assert_eq!(
            cells[12],
            SweepCell {
                p_fund: 0.9,
                tau: 24
            }
        );
    }

    #[test]
    fn failures_are_recorded() {
        let cell = SweepCell {
            p_fund: 0.5,
            tau: 4,
        };
        let results = vec![
            Ok(ReplicateResult {
                p_value: 0.2,
                gamma: Some(0.5),
            }),
            Err(Error::ZeroVariance),
            Ok(ReplicateResult {
                p_value: 0.4,
                gamma: None,
            }),
        ];
        let row = SweepRow::aggregate(cell, &results);
        assert_eq!((row.seed_count, row.failed), (2, 1));
        assert!((row.median_p_value.unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(row.gamma_median, Some(0.5));
    }
}
