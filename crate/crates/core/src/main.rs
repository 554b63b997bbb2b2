use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lattice_market::harness::{
    analyze_history, emit_plot_data, ingest_history, load_config, run_single, run_sweep,
    run_sweep_cells, sweep::percent_to_probability, table1_cells, write_atomic, AnalysisOptions,
};
use lattice_market::{Error, FieldMode, SimConfig};

#[derive(Parser)]
#[command(
    name = "lattice-market",
    version,
    about = "Three-state lattice market simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Largest autocorrelation lag reported and fitted.
    #[arg(long, default_value_t = 500)]
    max_lag: usize,
    /// Histogram bin count (Freedman–Diaconis when omitted).
    #[arg(long)]
    bins: Option<usize>,
    /// Sum trust weights without the neighbor spin factor.
    #[arg(long)]
    field_literal: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its stylized-facts report.
    Simulate {
        /// TOML run configuration (defaults when omitted)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Date,Close CSV to compare against
        #[arg(long)]
        history: Option<PathBuf>,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep P_fund (percent) and tau, comparing each run with the history.
    Sweep {
        /// TOML run configuration (defaults when omitted)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Date,Close CSV of historical closing prices
        #[arg(long)]
        history: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "60,70,80,90")]
        p_fund: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "20,24,28,32,36,40")]
        tau: Vec<usize>,
        /// Run only the fourteen published table cells instead of the grid.
        #[arg(long)]
        table1: bool,
        /// Replicates per cell
        #[arg(long, default_value_t = 8)]
        seeds: usize,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Stylized facts of the historical series alone.
    Analyze {
        /// Date,Close CSV of historical closing prices
        #[arg(long)]
        history: PathBuf,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

impl Common {
    fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            max_lag: self.max_lag,
            fit_range: lattice_market::stats::LagRange::new(1, self.max_lag),
            bins: self.bins,
            mode: if self.field_literal {
                FieldMode::Literal
            } else {
                FieldMode::SpinWeighted
            },
        }
    }

    fn config(&self, path: Option<&PathBuf>) -> Result<SimConfig, Error> {
        let mut config = match path {
            Some(p) => load_config(p)?,
            None => SimConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        config.validate()?;
        Ok(config)
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate {
            config,
            history,
            out,
            common,
        } => {
            let config = common.config(config.as_ref())?;
            let history = history.map(ingest_history).transpose()?;
            let report = run_single(&config, history.as_ref(), &common.options())?;
            for path in emit_plot_data(&report, &out)? {
                println!("{}", path.display());
            }
        }
        Command::Sweep {
            config,
            history,
            p_fund,
            tau,
            table1,
            seeds,
            out,
            common,
        } => {
            let config = common.config(config.as_ref())?;
            if seeds == 0 || (!table1 && (p_fund.is_empty() || tau.is_empty())) {
                return Err(Error::Config(
                    "sweep needs at least one cell and one seed".into(),
                ));
            }
            let history = ingest_history(history)?;
            let opts = common.options();
            let table = if table1 {
                run_sweep_cells(&config, &table1_cells(), seeds, &history, &opts)
            } else {
                let probs: Vec<f64> = p_fund.iter().copied().map(percent_to_probability).collect();
                for (&pct, &prob) in p_fund.iter().zip(&probs) {
                    SimConfig {
                        p_fund: prob,
                        ..config.clone()
                    }
                    .validate()
                    .map_err(|_| Error::Config(format!("p_fund {pct}% is not a probability")))?;
                }
                run_sweep(&config, &probs, &tau, seeds, &history, &opts)
            };
            std::fs::create_dir_all(&out).map_err(|e| Error::Io {
                path: out.clone(),
                source: e,
            })?;
            let path = write_atomic(&out, "sweep.csv", &table.to_csv())?;
            println!("{}", path.display());
            if let Some(sd) = table.median_p_value_std() {
                println!("std of median p-values: {sd}");
            }
        }
        Command::Analyze {
            history,
            out,
            common,
        } => {
            let history = ingest_history(history)?;
            let report = analyze_history(&history, &common.options());
            for path in emit_plot_data(&report, &out)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
