//! Daily closing prices from a `Date,Close` CSV file.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::market::log_return;

#[derive(Debug, Clone, PartialEq)]
pub struct HistoricalSeries {
    pub dates: Vec<NaiveDate>,
    pub closes: Vec<f64>,
    /// `ln(close[k+1] / close[k])`.
    pub returns: Vec<f64>,
}

impl HistoricalSeries {
    /// Builds a series from unordered rows: sorts by date, rejects duplicate
    /// dates and non-positive closes.
    pub fn from_rows(mut rows: Vec<(NaiveDate, f64)>) -> std::result::Result<Self, String> {
        if rows.is_empty() {
            return Err("no data rows".into());
        }
        if let Some((d, c)) = rows.iter().find(|(_, c)| !(c.is_finite() && *c > 0.0)) {
            return Err(format!("non-positive close {c} on {d}"));
        }
        rows.sort_by_key(|(d, _)| *d);
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(format!("duplicate date {}", w[0].0));
        }
        let (dates, closes): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        let returns = closes
            .windows(2)
            .map(|w| log_return(w[1], w[0]).expect("closes checked positive"))
            .collect();
        Ok(HistoricalSeries {
            dates,
            closes,
            returns,
        })
    }

    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }

    /// Rows with `from <= date <= to`.
    pub fn between(&self, from: NaiveDate, to: NaiveDate) -> std::result::Result<Self, String> {
        let rows = self
            .dates
            .iter()
            .zip(&self.closes)
            .filter(|(d, _)| (from..=to).contains(*d))
            .map(|(&d, &c)| (d, c))
            .collect();
        Self::from_rows(rows)
    }
}

fn data_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Data {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Reads CSV with a header containing `Date` (ISO-8601) and `Close`
/// columns; other columns are ignored.
pub fn read_history<R: std::io::Read>(reader: R, label: &Path) -> Result<HistoricalSeries> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv
        .headers()
        .map_err(|e| data_err(label, e.to_string()))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| data_err(label, format!("missing {name} column")))
    };
    let (date_col, close_col) = (column("Date")?, column("Close")?);

    let mut rows = Vec::new();
    for (k, record) in csv.records().enumerate() {
        let line = k + 2;
        let record = record.map_err(|e| data_err(label, format!("line {line}: {e}")))?;
        let field = |c: usize| record.get(c).unwrap_or("");
        let date = NaiveDate::parse_from_str(field(date_col), "%Y-%m-%d").map_err(|e| {
            data_err(
                label,
                format!("line {line}: bad date {:?}: {e}", field(date_col)),
            )
        })?;
        let close: f64 = field(close_col).parse().map_err(|_| {
            data_err(
                label,
                format!("line {line}: bad close {:?}", field(close_col)),
            )
        })?;
        rows.push((date, close));
    }
    HistoricalSeries::from_rows(rows).map_err(|reason| data_err(label, reason))
}

pub fn ingest_history(path: impl AsRef<Path>) -> Result<HistoricalSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| data_err(path, e.to_string()))?;
    read_history(std::io::BufReader::new(file), &PathBuf::from(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<HistoricalSeries> {
        read_history(text.as_bytes(), Path::new("test.csv"))
    }

    #[test]
    fn two_rows_one_return() {
        let h = parse("Date,Close\n2000-01-03,100\n2000-01-04,110\n").unwrap();
        assert_eq!(h.returns.len(), 1);
        assert!((h.returns[0] - 1.1_f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn unsorted_input_is_sorted() {
        let h = parse("Date,Close\n2000-01-05,121\n2000-01-03,100\n2000-01-04,110\n").unwrap();
        assert_eq!(h.closes, vec![100.0, 110.0, 121.0]);
        let mut got = h.returns.clone();
        let mut expect = [1.1_f64.ln(), 1.1_f64.ln()];
        got.sort_by(f64::total_cmp);
        expect.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn extra_columns_and_case() {
        let h = parse("date,Open,close,Volume\n2000-01-03,1,100,5\n2000-01-04,1,50,5\n").unwrap();
        assert_eq!(h.closes, vec![100.0, 50.0]);
    }

    #[test]
    fn rejects_bad_data() {
        for text in [
            "Date,Close\n2000-01-03,100\n2000-01-03,101\n",
            "Date,Close\n2000-01-03,-1\n",
            "Date,Close\n2000-01-03,0\n",
            "Date,Close\n03/01/2000,100\n",
            "Date,Close\n2000-01-03,abc\n",
            "Date,Price\n2000-01-03,100\n",
            "Date,Close\n",
        ] {
            assert!(matches!(parse(text), Err(Error::Data { .. })), "{text}");
        }
    }

    #[test]
    fn window_selection() {
        let h =
            parse("Date,Close\n1979-12-31,1\n1980-01-02,2\n2013-05-10,3\n2013-05-13,4\n").unwrap();
        let w = h
            .between(
                NaiveDate::from_ymd_opt(1980, 1, 2).unwrap(),
                NaiveDate::from_ymd_opt(2013, 5, 10).unwrap(),
            )
            .unwrap();
        assert_eq!(w.closes, vec![2.0, 3.0]);
    }
}
