//! Plot-ready CSV files and the flat run summary.
//!
//! Every file is written to a temporary sibling and renamed into place.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::dynamics::FieldMode;
use crate::error::{Error, Result};
use crate::harness::config::emit_config;
use crate::harness::report::{SeriesFacts, StylizedFactsReport};
use crate::stats::ClusteringSeries;

pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const AUTOCORR_FILE: &str = "autocorr.csv";
pub const CLUSTERING_FILE: &str = "clustering.csv";
pub const CLUSTERING_HIST_FILE: &str = "clustering_hist.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.toml";

/// Writes `bytes` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, &target).map_err(|e| Error::io(&target, e))?;
    Ok(target)
}

pub(crate) fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn histogram_csv(report: &StylizedFactsReport) -> Option<Vec<u8>> {
    let h = report.histogram.as_ref()?;
    let mut header = vec!["bin_left", "bin_right"];
    if h.simulated.is_some() {
        header.extend(["count_sim", "density_sim"]);
    }
    if h.historical.is_some() {
        header.extend(["count_hist", "density_hist"]);
    }
    let rows = (0..h.edges.len() - 1).map(|k| {
        let mut row = vec![num(h.edges[k]), num(h.edges[k + 1])];
        for (counts, dens) in [&h.simulated, &h.historical].into_iter().flatten() {
            row.push(counts[k].to_string());
            row.push(num(dens[k]));
        }
        row
    });
    Some(csv_bytes(&header, rows))
}

fn autocorr_csv(report: &StylizedFactsReport) -> Vec<u8> {
    let curve = |f: Option<&SeriesFacts>| f.and_then(|s| s.autocorr.clone());
    let sim = curve(report.simulated.as_ref());
    let hist = curve(report.historical.as_ref());
    let fit = report
        .simulated
        .as_ref()
        .and_then(|s| s.fit)
        .or_else(|| report.historical.as_ref().and_then(|s| s.fit));
    let rows = (1..=report.max_lag).map(|lag| {
        vec![
            lag.to_string(),
            opt(sim.as_ref().and_then(|c| c.at(lag))),
            opt(hist.as_ref().and_then(|c| c.at(lag))),
            opt(fit.map(|f| f.predict(lag))),
        ]
    });
    csv_bytes(&["lag", "C_sim", "C_hist", "powerlaw_fit"], rows)
}

fn clustering_csv(c: &ClusteringSeries<f64>) -> Vec<u8> {
    let rows = c
        .returns
        .iter()
        .zip(&c.abs_returns)
        .enumerate()
        .map(|(t, (r, a))| vec![(t + 1).to_string(), num(*r), num(*a)]);
    csv_bytes(&["t", "r", "abs_r"], rows)
}

fn put(map: &mut Map<String, Value>, key: &str, value: Option<f64>) {
    let v = value
        .and_then(serde_json::Number::from_f64)
        .map(Value::Number)
        .unwrap_or(Value::Null);
    map.insert(key.to_string(), v);
}

fn put_facts(map: &mut Map<String, Value>, prefix: &str, facts: &SeriesFacts) {
    map.insert(
        format!("{prefix}_returns"),
        Value::from(facts.returns.len()),
    );
    put(
        map,
        &format!("{prefix}_excess_kurtosis"),
        facts.excess_kurtosis,
    );
    put(map, &format!("gamma_{prefix}"), facts.fit.map(|f| f.gamma));
    put(
        map,
        &format!("gamma_{prefix}_amplitude"),
        facts.fit.map(|f| f.amplitude),
    );
    put(
        map,
        &format!("gamma_{prefix}_r_squared"),
        facts.fit.map(|f| f.r_squared),
    );
    map.insert(
        format!("gamma_{prefix}_points"),
        facts
            .fit
            .map(|f| Value::from(f.points_used))
            .unwrap_or(Value::Null),
    );
    map.insert(
        format!("gamma_{prefix}_excluded"),
        facts
            .fit
            .map(|f| Value::from(f.excluded))
            .unwrap_or(Value::Null),
    );
    put(
        map,
        &format!("gamma_{prefix}_raw"),
        facts.raw_fit.map(|f| f.gamma),
    );
}

/// Flat key-value summary of a report, as pretty JSON.
pub fn summary_json(report: &StylizedFactsReport) -> String {
    let mut map = Map::new();
    map.insert(
        "field_mode".into(),
        Value::from(match report.mode {
            FieldMode::SpinWeighted => "spin_weighted",
            FieldMode::Literal => "literal",
        }),
    );
    map.insert("max_lag".into(), Value::from(report.max_lag));
    map.insert(
        "seed".into(),
        report.seed().map(Value::from).unwrap_or(Value::Null),
    );
    if let Some(sim) = &report.simulated {
        put_facts(&mut map, "sim", sim);
    }
    if let Some(hist) = &report.historical {
        put_facts(&mut map, "hist", hist);
    }
    put(&mut map, "ks_statistic", report.ks.map(|k| k.statistic));
    put(&mut map, "ks_p_value", report.ks.map(|k| k.p_value));
    let mut text = serde_json::to_string_pretty(&Value::Object(map)).expect("plain values");
    text.push('\n');
    text
}

/// Writes the plot data files of `report` into `out_dir`, creating it if needed.
pub fn emit_plot_data(
    report: &StylizedFactsReport,
    out_dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    if let Some(bytes) = histogram_csv(report) {
        written.push(write_atomic(dir, HISTOGRAM_FILE, &bytes)?);
    }
    written.push(write_atomic(dir, AUTOCORR_FILE, &autocorr_csv(report))?);
    match (&report.simulated, &report.historical) {
        (Some(sim), hist) => {
            written.push(write_atomic(
                dir,
                CLUSTERING_FILE,
                &clustering_csv(&sim.clustering),
            )?);
            if let Some(h) = hist {
                written.push(write_atomic(
                    dir,
                    CLUSTERING_HIST_FILE,
                    &clustering_csv(&h.clustering),
                )?);
            }
        }
        (None, Some(h)) => {
            written.push(write_atomic(
                dir,
                CLUSTERING_FILE,
                &clustering_csv(&h.clustering),
            )?);
        }
        (None, None) => {}
    }
    written.push(write_atomic(
        dir,
        SUMMARY_FILE,
        summary_json(report).as_bytes(),
    )?);
    if let Some(config) = &report.config {
        written.push(write_atomic(
            dir,
            CONFIG_FILE,
            emit_config(config)?.as_bytes(),
        )?);
    }
    Ok(written)
}
