//! Dated series ingestion, transformations and CSV output.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use clap::ValueEnum;

use crate::error::{CliError, Result};

/// Observations with their date labels; dates are kept verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct DatedSeries {
    pub dates: Vec<String>,
    pub values: Vec<f64>,
}

impl DatedSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    Log,
    Diff,
}

/// Accepts `YYYY-MM-DD` and `YYYY-MM`.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(&format!("{s}-01"), "%Y-%m-%d"))
        .ok()
}

pub fn ingest_csv(path: &Path) -> Result<DatedSeries> {
    let file = File::open(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    parse_csv(file, &path.display().to_string())
}

/// Parses a two-column `date,value` CSV. A leading header row is skipped.
///
/// Missing values (empty or `.`) are rejected, as are dates that do not
/// strictly increase.
pub fn parse_csv<R: Read>(input: R, name: &str) -> Result<DatedSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let err = |line: u64, message: String| CliError::Data {
        path: name.to_string(),
        line,
        message,
    };
    let mut series = DatedSeries {
        dates: Vec::new(),
        values: Vec::new(),
    };
    let mut last: Option<NaiveDate> = None;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(i as u64 + 1);
        let date_field = record.get(0).unwrap_or("");
        let date = match parse_date(date_field) {
            Some(d) => d,
            None if i == 0 => continue,
            None => return Err(err(line, format!("unparseable date {date_field:?}"))),
        };
        if record.len() != 2 {
            return Err(err(line, format!("expected 2 columns, found {}", record.len())));
        }
        let raw = &record[1];
        if raw.is_empty() || raw == "." {
            return Err(err(line, format!("missing value for {date_field}")));
        }
        let value: f64 = raw
            .parse()
            .map_err(|_| err(line, format!("unparseable value {raw:?}")))?;
        if !value.is_finite() {
            return Err(err(line, format!("non-finite value {raw:?}")));
        }
        if let Some(prev) = last {
            if date <= prev {
                return Err(err(
                    line,
                    format!("dates must increase strictly: {date_field} follows {prev}"),
                ));
            }
        }
        last = Some(date);
        series.dates.push(date_field.to_string());
        series.values.push(value);
    }
    Ok(series)
}

/// Applies `ops` in order. Each difference drops the first observation.
pub fn transform(mut series: DatedSeries, ops: &[Transform]) -> Result<DatedSeries> {
    for op in ops {
        match op {
            Transform::Log => {
                if let Some(i) = series.values.iter().position(|&v| !(v > 0.0)) {
                    return Err(CliError::Input(format!(
                        "log of non-positive value {} at index {i} ({})",
                        series.values[i], series.dates[i]
                    )));
                }
                series.values.iter_mut().for_each(|v| *v = v.ln());
            }
            Transform::Diff => {
                if series.is_empty() {
                    return Err(CliError::Input("cannot difference an empty series".into()));
                }
                series.values = series.values.windows(2).map(|w| w[1] - w[0]).collect();
                series.dates.remove(0);
            }
        }
    }
    Ok(series)
}

/// Reads a `lag,weight` coefficient file; lags must run `0, 1, …`.
pub fn read_coefficients(path: &Path) -> Result<Vec<f64>> {
    let name = path.display().to_string();
    let file = File::open(path).map_err(|e| CliError::io(&name, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let mut weights = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Data {
            path: name.clone(),
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let bad = |message: String| CliError::Data {
            path: name.clone(),
            line,
            message,
        };
        let lag: usize = record[0]
            .parse()
            .map_err(|_| bad(format!("unparseable lag {:?}", &record[0])))?;
        if lag != weights.len() {
            return Err(bad(format!("expected lag {}, found {lag}", weights.len())));
        }
        let w: f64 = record
            .get(1)
            .unwrap_or("")
            .parse()
            .map_err(|_| bad("unparseable weight".into()))?;
        weights.push(w);
    }
    if weights.is_empty() {
        return Err(CliError::Input(format!("{name}: no coefficients")));
    }
    Ok(weights)
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path.display().to_string(), e))
}

/// Writes `date,value` rows with round-trip float formatting.
pub fn write_series(path: &Path, dates: &[String], values: &[f64]) -> Result<()> {
    let mut out = create(path)?;
    let io = |e| CliError::io(path.display().to_string(), e);
    writeln!(out, "date,value").map_err(io)?;
    for (d, v) in dates.iter().zip(values) {
        writeln!(out, "{d},{v:?}").map_err(io)?;
    }
    out.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: &[f64]) -> DatedSeries {
        DatedSeries {
            dates: (0..values.len()).map(|i| format!("2000-{:02}", i + 1)).collect(),
            values: values.to_vec(),
        }
    }

    #[test]
    fn headerless_input() {
        let s = parse_csv("2020-01,101.5\n2020-02,99.2".as_bytes(), "x").unwrap();
        assert_eq!(s.values, vec![101.5, 99.2]);
        assert_eq!(s.dates, vec!["2020-01", "2020-02"]);
    }

    #[test]
    fn missing_value_line() {
        let text = "DATE,INDPRO\n2020-01,1\n2020-02,2\n2020-03,\n";
        match parse_csv(text.as_bytes(), "x").unwrap_err() {
            CliError::Data { line, message, .. } => {
                assert_eq!(line, 4);
                assert!(message.contains("missing"));
            }
            e => panic!("{e}"),
        }
        let dot = "DATE,INDPRO\n2020-01-01,.\n";
        assert!(matches!(parse_csv(dot.as_bytes(), "x"), Err(CliError::Data { line: 2, .. })));
    }

    #[test]
    fn unsorted_dates() {
        let text = "date,value\n2020-02,1\n2020-01,2\n";
        let e = parse_csv(text.as_bytes(), "x").unwrap_err();
        assert!(e.to_string().contains("increase"), "{e}");
        assert_eq!(e.category(), "input");
    }

    #[test]
    fn transforms() {
        let e = std::f64::consts::E;
        let s = transform(series(&[e, e * e]), &[Transform::Log]).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-15 && (s.values[1] - 2.0).abs() < 1e-15);
        let s = transform(series(&[1.0, 3.0, 6.0]), &[Transform::Diff]).unwrap();
        assert_eq!(s.values, vec![2.0, 3.0]);
        assert_eq!(s.dates, vec!["2000-02", "2000-03"]);
        let s = transform(series(&[1.0, e]), &[Transform::Log, Transform::Diff]).unwrap();
        assert_eq!(s.values, vec![1.0]);
    }

    #[test]
    fn log_rejects_non_positive() {
        let e = transform(series(&[1.0, 0.0]), &[Transform::Log]).unwrap_err();
        assert!(e.to_string().contains("index 1"), "{e}");
    }
}
