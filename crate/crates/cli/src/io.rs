//! CSV ingestion and emission.
//!
//! Inputs carry a `timestamp,score` (scores) or `timestamp` (events) header.
//! Timestamps are either numeric epoch seconds or ISO-8601 date-times; a
//! date-time without an offset is read as UTC. Every float written by this
//! module uses 17 significant digits, which round-trips `f64` exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDateTime};
use pwroc_core::{EventLog, ScoredSeries};

use crate::error::{CliError, Result};

/// `f64` with 17 significant digits; infinities as `inf` / `-inf`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Seconds since the Unix epoch from a numeric or ISO-8601 field.
pub fn parse_time(field: &str) -> Option<f64> {
    let field = field.trim();
    if let Ok(v) = field.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(field) {
        return Some(epoch_seconds(dt.timestamp(), dt.timestamp_subsec_nanos()));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(field, fmt) {
            let utc = naive.and_utc();
            return Some(epoch_seconds(utc.timestamp(), utc.timestamp_subsec_nanos()));
        }
    }
    None
}

fn epoch_seconds(secs: i64, nanos: u32) -> f64 {
    secs as f64 + f64::from(nanos) * 1e-9
}

fn open_csv(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file))
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn check_header(reader: &mut csv::Reader<File>, path: &Path, expected: &[&str]) -> Result<()> {
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?;
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(parse_err(
            path,
            1,
            format!(
                "expected header '{}', found '{}'",
                expected.join(","),
                got.join(",")
            ),
        ));
    }
    Ok(())
}

/// Reads `(timestamp, values...)` rows, enforcing strictly increasing times.
fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<(f64, Vec<f64>)>> {
    let mut reader = open_csv(path)?;
    check_header(&mut reader, path, header)?;
    let mut rows: Vec<(f64, Vec<f64>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(parse_err(
                path,
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let t = parse_time(&record[0])
            .ok_or_else(|| parse_err(path, line, format!("bad timestamp '{}'", &record[0])))?;
        let mut values = Vec::with_capacity(header.len() - 1);
        for field in record.iter().skip(1) {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(path, line, format!("bad number '{field}'")))?;
            if !v.is_finite() {
                return Err(parse_err(path, line, format!("non-finite value '{field}'")));
            }
            values.push(v);
        }
        if let Some(&(prev, _)) = rows.last() {
            if t == prev {
                return Err(parse_err(path, line, format!("duplicate timestamp {t}")));
            }
            if t < prev {
                return Err(parse_err(
                    path,
                    line,
                    format!("timestamp {t} is out of order"),
                ));
            }
        }
        rows.push((t, values));
    }
    if rows.is_empty() {
        return Err(parse_err(path, 1, "no data rows"));
    }
    Ok(rows)
}

pub fn load_scores(path: impl AsRef<Path>) -> Result<ScoredSeries> {
    let rows = read_rows(path.as_ref(), &["timestamp", "score"])?;
    let (ts, scores): (Vec<f64>, Vec<f64>) = rows.into_iter().map(|(t, v)| (t, v[0])).unzip();
    Ok(ScoredSeries::new(ts, scores)?)
}

pub fn load_events(path: impl AsRef<Path>) -> Result<EventLog> {
    let rows = read_rows(path.as_ref(), &["timestamp"])?;
    Ok(EventLog::new(rows.into_iter().map(|(t, _)| t).collect())?)
}

/// Buffered CSV writer that reports errors with the file path.
pub struct CsvOut {
    path: PathBuf,
    inner: BufWriter<File>,
}

impl CsvOut {
    pub fn create(path: impl Into<PathBuf>, header: &str) -> Result<Self> {
        let path = path.into();
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut out = Self {
            path,
            inner: BufWriter::new(file),
        };
        out.line(header)?;
        Ok(out)
    }

    pub fn line(&mut self, line: &str) -> Result<()> {
        writeln!(self.inner, "{line}").map_err(|e| CliError::io(&self.path, e))
    }

    /// Writes a row of floats.
    pub fn floats(&mut self, values: &[f64]) -> Result<()> {
        let row: Vec<String> = values.iter().map(|&v| fmt_f64(v)).collect();
        self.line(&row.join(","))
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

pub fn write_scores(path: impl Into<PathBuf>, series: &ScoredSeries) -> Result<()> {
    let mut out = CsvOut::create(path, "timestamp,score")?;
    for (t, s) in series.iter() {
        out.floats(&[t, s])?;
    }
    out.finish()
}

pub fn write_events(path: impl Into<PathBuf>, events: &EventLog) -> Result<()> {
    let mut out = CsvOut::create(path, "timestamp")?;
    for &s in events.events() {
        out.floats(&[s])?;
    }
    out.finish()
}

pub fn write_json(path: impl AsRef<Path>, value: &impl serde::Serialize) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}
