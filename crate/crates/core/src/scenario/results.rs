use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::series::{format_timestamp, read_series_csv, write_series_csv};
use super::{KpiReport, ScenarioError};
use crate::network::{DispatchSolution, TimeGrid};

/// Paths written by [`write_results`].
#[derive(Debug, Clone, PartialEq)]
pub struct ResultFiles {
    /// Power per flow and step in W, one column per flow.
    pub dispatch: PathBuf,
    /// Layer volumes in m³ at every step boundary.
    pub storage: PathBuf,
    /// `timestamp,flow,power_w` rows for plotting tools.
    pub dispatch_long: PathBuf,
    pub kpi: PathBuf,
}

pub fn write_results(solution: &DispatchSolution, report: &KpiReport, dir: &Path) -> Result<ResultFiles, ScenarioError> {
    fs::create_dir_all(dir).map_err(|source| ScenarioError::Io { path: dir.to_path_buf(), source })?;
    let files = ResultFiles {
        dispatch: dir.join("dispatch.csv"),
        storage: dir.join("storage.csv"),
        dispatch_long: dir.join("dispatch_long.csv"),
        kpi: dir.join("kpi.json"),
    };
    let grid = &solution.grid;
    let steps: Vec<_> = (0..grid.steps()).map(|t| grid.timestamp(t)).collect();

    let columns: Vec<(&str, &[f64])> = solution.flows.iter().map(|(k, v)| (k.as_str(), v.as_slice())).collect();
    write_series_csv(&files.dispatch, &steps, &columns)?;

    let mut names = Vec::new();
    let mut data: Vec<&[f64]> = Vec::new();
    for (id, layers) in &solution.storage {
        for (n, layer) in layers.iter().enumerate() {
            names.push(format!("{id}_l{n}"));
            data.push(layer);
        }
        if let Some(s) = solution.surface_overestimate.get(id) {
            names.push(format!("{id}_surface_overestimate"));
            data.push(s);
        }
    }
    let columns: Vec<(&str, &[f64])> = names.iter().map(String::as_str).zip(data).collect();
    write_series_csv(&files.storage, &grid.boundaries(), &columns)?;

    let mut long = String::from("timestamp,flow,power_w\n");
    for (t, ts) in steps.iter().enumerate() {
        let ts = format_timestamp(*ts);
        for (id, series) in &solution.flows {
            long.push_str(&format!("{ts},{id},{}\n", series[t]));
        }
    }
    fs::write(&files.dispatch_long, long).map_err(|source| ScenarioError::Io { path: files.dispatch_long.clone(), source })?;

    let mut json = serde_json::to_string_pretty(report).expect("KPI reports always serialize");
    json.push('\n');
    fs::write(&files.kpi, json).map_err(|source| ScenarioError::Io { path: files.kpi.clone(), source })?;
    Ok(files)
}

/// Read a dispatch file written by [`write_results`] back into flow series.
pub fn read_dispatch_csv(path: &Path, grid: &TimeGrid) -> Result<BTreeMap<String, Vec<f64>>, ScenarioError> {
    let table = read_series_csv(path)?;
    table.check_grid(grid, path)?;
    Ok(table.columns)
}

pub fn read_kpi_json(path: &Path) -> Result<KpiReport, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| ScenarioError::Syntax { path: path.to_path_buf(), message: e.to_string() })
}
