//! Delimited time-series files: a `timestamp` column (RFC 3339, UTC)
//! followed by numeric columns.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};

use super::ScenarioError;
use crate::network::TimeGrid;

/// Columns of one series file, keyed by header.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub timestamps: Vec<DateTime<Utc>>,
    pub columns: BTreeMap<String, Vec<f64>>,
}

impl SeriesTable {
    /// Check that the rows are exactly the steps of `grid`.
    pub fn check_grid(&self, grid: &TimeGrid, path: &Path) -> Result<(), ScenarioError> {
        let mismatch = |message: String| ScenarioError::GridMismatch { path: path.to_path_buf(), message };
        if self.timestamps.len() != grid.steps() {
            return Err(mismatch(format!("{} rows for a grid of {} steps", self.timestamps.len(), grid.steps())));
        }
        for (t, ts) in self.timestamps.iter().enumerate() {
            if *ts != grid.timestamp(t) {
                return Err(mismatch(format!("row {} is {ts}, expected {}", t + 1, grid.timestamp(t))));
            }
        }
        Ok(())
    }
}

pub fn format_timestamp(ts: DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

fn csv_error(path: &Path, e: csv::Error) -> ScenarioError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => ScenarioError::Io { path: path.to_path_buf(), source },
        other => ScenarioError::Csv { path: path.to_path_buf(), line: 0, message: format!("{other:?}") },
    }
}

/// Read a series file.
pub fn read_series_csv(path: &Path) -> Result<SeriesTable, ScenarioError> {
    let file = File::open(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            ScenarioError::MissingSeries { path: path.to_path_buf() }
        } else {
            ScenarioError::Io { path: path.to_path_buf(), source }
        }
    })?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers: Vec<String> = reader.headers().map_err(|e| csv_error(path, e))?.iter().map(str::to_string).collect();
    if headers.first().map(String::as_str) != Some("timestamp") {
        return Err(ScenarioError::Csv { path: path.to_path_buf(), line: 1, message: "first column must be `timestamp`".into() });
    }
    let mut timestamps = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len() - 1];
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let bad = |message: String| ScenarioError::Csv { path: path.to_path_buf(), line, message };
        let record = record.map_err(|e| csv_error(path, e))?;
        let ts = DateTime::parse_from_rfc3339(&record[0]).map_err(|e| bad(format!("timestamp {:?}: {e}", &record[0])))?;
        timestamps.push(ts.with_timezone(&Utc));
        for (c, field) in record.iter().skip(1).enumerate() {
            let v: f64 = field.parse().map_err(|_| bad(format!("column {}: {field:?} is not a number", headers[c + 1])))?;
            if !v.is_finite() {
                return Err(bad(format!("column {}: non-finite value", headers[c + 1])));
            }
            columns[c].push(v);
        }
    }
    let mut map = BTreeMap::new();
    for (name, values) in headers.into_iter().skip(1).zip(columns) {
        if map.insert(name.clone(), values).is_some() {
            return Err(ScenarioError::Csv { path: path.to_path_buf(), line: 1, message: format!("duplicate column {name}") });
        }
    }
    Ok(SeriesTable { timestamps, columns: map })
}

/// Write columns in the given order. Values use the shortest text that
/// parses back to the same `f64`.
pub fn write_series_csv(
    path: &Path,
    timestamps: &[DateTime<Utc>],
    columns: &[(&str, &[f64])],
) -> Result<(), ScenarioError> {
    let io = |source| ScenarioError::Io { path: path.to_path_buf(), source };
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut header = vec!["timestamp"];
    header.extend(columns.iter().map(|(name, _)| *name));
    writer.write_record(&header).map_err(|e| csv_error(path, e))?;
    for (t, ts) in timestamps.iter().enumerate() {
        let mut row = vec![format_timestamp(*ts)];
        row.extend(columns.iter().map(|(_, v)| v[t].to_string()));
        writer.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(io)
}
