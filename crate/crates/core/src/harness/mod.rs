//! Orchestration: configuration files, historical data, single runs,
//! parameter sweeps and output files.

pub mod config;
pub mod history;
pub mod output;
pub mod report;
pub mod sweep;

pub use config::{emit_config, load_config, parse_config, CONFIG_KEYS};
pub use history::{ingest_history, read_history, HistoricalSeries};
pub use output::{emit_plot_data, summary_json, write_atomic};
pub use report::{
    analyze_history, run_single, AnalysisOptions, HistogramSet, SeriesFacts, StylizedFactsReport,
};
pub use sweep::{
    cell_config, cell_seed, run_replicate, run_sweep, run_sweep_cells, table1_cells, SweepCell,
    SweepRow, SweepTable, TABLE1_REFERENCE,
};
