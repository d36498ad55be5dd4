//! Scenario documents, series ingestion, result files and KPIs.
//!
//! A scenario is one TOML document. Every dimensioned field accepts a bare
//! number in SI units, a quantity string such as `"45 degC"` or
//! `"280 kW"`, or a series reference
//! `{ series = "weather.csv", column = "ambient", unit = "degC" }`
//! resolved against the document's directory.

mod kpi;
mod results;
mod series;
mod synthetic;
mod units;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

pub use kpi::{compute_kpis, KpiReport};
pub use results::{read_dispatch_csv, read_kpi_json, write_results, ResultFiles};
pub use series::{format_timestamp, read_series_csv, write_series_csv, SeriesTable};
pub use synthetic::{mini_helleheide, write_mini_helleheide, MINI_HELLEHEIDE_STEPS};
pub use units::{parse_quantity, split_quantity, Dimension};

use crate::components::Component;
use crate::lp::SolverTolerances;
use crate::network::{Bus, Carrier, FlowSpec, NetworkError, NetworkModel, ObjectiveKind, TimeGrid};
use crate::thermo::{Medium, TemperatureLadder};

/// Schema version written by this build. Documents with the same major
/// version are accepted.
pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Syntax { path: PathBuf, message: String },
    #[error("{location}: {message}")]
    Schema { location: String, message: String },
    #[error("series file {path} not found")]
    MissingSeries { path: PathBuf },
    #[error("{path}: no column {column:?}")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{location}: {message}")]
    Unit { location: String, message: String },
    #[error("{path}: {message}")]
    GridMismatch { path: PathBuf, message: String },
    #[error("{path}:{line}: {message}")]
    Csv { path: PathBuf, line: usize, message: String },
    #[error("{location}: {source}")]
    Network { location: String, source: NetworkError },
    #[error("KPI undefined: {0}")]
    Kpi(String),
}

impl ScenarioError {
    fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Schema { location: location.into(), message: message.into() }
    }
}

/// A fully resolved scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub schema_version: String,
    pub objective: ObjectiveKind,
    pub tolerances: SolverTolerances,
    pub network: NetworkModel,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeSection {
    start: DateTime<Utc>,
    /// Step length in s.
    step: f64,
    steps: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    feasibility: f64,
    optimality: f64,
    integrality: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MediumSection {
    density: f64,
    heat_capacity: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitSection {
    id: String,
    levels: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    medium: Option<MediumSection>,
}

const TOP_LEVEL_KEYS: [&str; 9] =
    ["schema_version", "name", "objective", "time", "solver", "circuits", "buses", "flows", "components"];

struct Resolver<'a> {
    base: &'a Path,
    grid: Option<TimeGrid>,
    cache: HashMap<PathBuf, SeriesTable>,
}

impl Resolver<'_> {
    fn series(&mut self, location: &str, table: &Table, dim: Dimension) -> Result<Value, ScenarioError> {
        let field = |key: &str| -> Result<&str, ScenarioError> {
            table
                .get(key)
                .and_then(Value::as_str)
                .ok_or_else(|| ScenarioError::schema(location, format!("series reference needs a string `{key}`")))
        };
        let (file, column, unit) = (field("series")?, field("column")?, field("unit")?);
        if let Some(extra) = table.keys().find(|k| !["series", "column", "unit"].contains(&k.as_str())) {
            return Err(ScenarioError::schema(location, format!("unknown key {extra:?} in series reference")));
        }
        let convert = dim
            .converter(unit)
            .ok_or_else(|| ScenarioError::Unit { location: location.into(), message: format!("unit {unit:?} does not measure {dim}") })?;
        let path = self.base.join(file);
        if !self.cache.contains_key(&path) {
            let table = read_series_csv(&path)?;
            let grid = self.grid.as_ref().ok_or_else(|| ScenarioError::schema(location, "series used before the time grid is known"))?;
            table.check_grid(grid, &path)?;
            self.cache.insert(path.clone(), table);
        }
        let values = self.cache[&path]
            .columns
            .get(column)
            .ok_or_else(|| ScenarioError::MissingColumn { path: path.clone(), column: column.into() })?;
        Ok(series_value(values.iter().map(|&v| convert(v)), dim))
    }

    fn quantity(&mut self, location: &str, value: &Value, dim: Dimension) -> Result<Value, ScenarioError> {
        let unit_error = |message: String| ScenarioError::Unit { location: location.into(), message };
        match value {
            Value::Float(_) => Ok(value.clone()),
            Value::Integer(i) => Ok(Value::Float(*i as f64)),
            Value::String(s) => parse_quantity(s, dim).map(Value::Float).map_err(unit_error),
            Value::Array(items) => items
                .iter()
                .enumerate()
                .map(|(i, v)| self.quantity(&format!("{location}[{i}]"), v, dim))
                .collect::<Result<Vec<_>, _>>()
                .map(Value::Array),
            Value::Table(t) if t.contains_key("series") => self.series(location, t, dim),
            Value::Table(t) if t.contains_key("values") => {
                let unit = t.get("unit").and_then(Value::as_str).ok_or_else(|| unit_error("inline series needs a `unit`".into()))?;
                let convert = dim.converter(unit).ok_or_else(|| unit_error(format!("unit {unit:?} does not measure {dim}")))?;
                let items = t.get("values").and_then(Value::as_array).ok_or_else(|| unit_error("`values` must be an array".into()))?;
                let values = items
                    .iter()
                    .map(|v| match v {
                        Value::Float(f) => Ok(convert(*f)),
                        Value::Integer(i) => Ok(convert(*i as f64)),
                        _ => Err(unit_error("inline series values must be numbers".into())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(series_value(values.into_iter(), dim))
            }
            _ => Err(unit_error(format!("expected a number, quantity string or series reference for a {dim}"))),
        }
    }

    fn walk(&mut self, location: &str, value: &mut Value) -> Result<(), ScenarioError> {
        match value {
            Value::Table(table) => {
                for (key, v) in table.iter_mut() {
                    let loc = if location.is_empty() { key.clone() } else { format!("{location}.{key}") };
                    match Dimension::of_field(key) {
                        Some(dim) => *v = self.quantity(&loc, v, dim)?,
                        None => self.walk(&loc, v)?,
                    }
                }
            }
            Value::Array(items) => {
                for (i, v) in items.iter_mut().enumerate() {
                    self.walk(&format!("{location}[{i}]"), v)?;
                }
            }
            Value::Datetime(d) => *value = Value::String(d.to_string()),
            _ => {}
        }
        Ok(())
    }
}

fn series_value(values: impl Iterator<Item = f64>, dim: Dimension) -> Value {
    let mut t = Table::new();
    t.insert("values".into(), Value::Array(values.map(Value::Float).collect()));
    t.insert("unit".into(), Value::String(dim.si_unit().into()));
    Value::Table(t)
}

fn take<T: DeserializeOwned>(table: &mut Table, key: &str) -> Result<Option<T>, ScenarioError> {
    table.remove(key).map(|v| v.try_into().map_err(|e: toml::de::Error| ScenarioError::schema(key, e.message()))).transpose()
}

fn require<T: DeserializeOwned>(table: &mut Table, key: &str) -> Result<T, ScenarioError> {
    take(table, key)?.ok_or_else(|| ScenarioError::schema(key, "missing"))
}

/// Deserialize an array of tables item by item so errors carry an index and id.
fn take_list<T: DeserializeOwned>(table: &mut Table, key: &str) -> Result<Vec<T>, ScenarioError> {
    let Some(value) = table.remove(key) else { return Ok(Vec::new()) };
    let Value::Array(items) = value else { return Err(ScenarioError::schema(key, "expected an array of tables")) };
    items
        .into_iter()
        .enumerate()
        .map(|(i, item)| {
            let id = item.get("id").and_then(Value::as_str).map(|s| format!(" ({s})")).unwrap_or_default();
            item.try_into().map_err(|e: toml::de::Error| ScenarioError::schema(format!("{key}[{i}]{id}"), e.message()))
        })
        .collect()
}

fn check_version(version: &str) -> Result<(), ScenarioError> {
    let major = |v: &str| v.split('.').next().and_then(|m| m.parse::<u64>().ok());
    match (major(version), major(SCHEMA_VERSION)) {
        (Some(a), Some(b)) if a == b && version.split('.').count() == 3 => Ok(()),
        _ => Err(ScenarioError::schema("schema_version", format!("unsupported version {version:?}, expected {SCHEMA_VERSION}"))),
    }
}

/// Parse a scenario document; series paths resolve against `base`.
pub fn load_scenario_str(text: &str, base: &Path, origin: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let mut doc: Table =
        text.parse().map_err(|e: toml::de::Error| ScenarioError::Syntax { path: origin.to_path_buf(), message: e.to_string() })?;
    if let Some(key) = doc.keys().find(|k| !TOP_LEVEL_KEYS.contains(&k.as_str())) {
        return Err(ScenarioError::schema(key.as_str(), "unknown top-level key"));
    }
    let schema_version: String = require(&mut doc, "schema_version")?;
    check_version(&schema_version)?;

    let mut resolver = Resolver { base, grid: None, cache: HashMap::new() };
    let mut time = doc.remove("time").ok_or_else(|| ScenarioError::schema("time", "missing"))?;
    resolver.walk("time", &mut time)?;
    let time: TimeSection = time.try_into().map_err(|e: toml::de::Error| ScenarioError::schema("time", e.message()))?;
    if !(time.step >= 1.0 && time.step.fract() == 0.0 && time.step <= u32::MAX as f64) {
        return Err(ScenarioError::schema("time.step", format!("step must be a whole number of seconds, got {}", time.step)));
    }
    let grid = TimeGrid::new(time.start, time.step as u32, time.steps)
        .map_err(|source| ScenarioError::Network { location: "time".into(), source })?;
    resolver.grid = Some(grid.clone());

    let mut rest = Value::Table(doc);
    resolver.walk("", &mut rest)?;
    let Value::Table(mut doc) = rest else { unreachable!() };

    let name: String = require(&mut doc, "name")?;
    let objective: ObjectiveKind = require(&mut doc, "objective")?;
    let tolerances = match take::<SolverSection>(&mut doc, "solver")? {
        Some(s) => SolverTolerances { feasibility: s.feasibility, optimality: s.optimality, integrality: s.integrality },
        None => SolverTolerances::default(),
    };
    let circuits: Vec<CircuitSection> = take_list(&mut doc, "circuits")?;
    let buses: Vec<Bus> = take_list(&mut doc, "buses")?;
    let flows: Vec<FlowSpec> = take_list(&mut doc, "flows")?;
    let components: Vec<Component> = take_list(&mut doc, "components")?;

    let mut network = NetworkModel::new(grid);
    for (i, c) in circuits.into_iter().enumerate() {
        let location = format!("circuits[{i}] ({})", c.id);
        let thermo = |source| ScenarioError::Network {
            location: location.clone(),
            source: NetworkError::Thermo { context: c.id.clone(), source },
        };
        let ladder = TemperatureLadder::from_kelvin(&c.levels).map_err(thermo)?;
        let medium = match &c.medium {
            Some(m) => Medium::new(m.density, m.heat_capacity).map_err(thermo)?,
            None => Medium::water(),
        };
        network.add_circuit(&c.id, ladder, medium);
    }
    for (i, bus) in buses.into_iter().enumerate() {
        if matches!(bus.carrier, Carrier::Heat { .. } | Carrier::Supply { .. }) {
            return Err(ScenarioError::schema(format!("buses[{i}] ({})", bus.id), "heat and supply buses are created by their circuit"));
        }
        network.add_bus(&bus.id, bus.carrier);
    }
    for flow in flows {
        network.add_flow(flow);
    }
    for component in components {
        network.add_component(component);
    }
    network.validate().map_err(|source| ScenarioError::Network { location: name.clone(), source })?;
    Ok(ScenarioConfig { name, schema_version, objective, tolerances, network })
}

/// Load a scenario document from disk.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
    let base = path.parent().unwrap_or(Path::new("."));
    load_scenario_str(&text, base, path)
}

#[derive(Serialize)]
struct DocumentOut<'a> {
    schema_version: &'a str,
    name: &'a str,
    objective: ObjectiveKind,
    time: TimeSection,
    solver: SolverSection,
    circuits: Vec<CircuitSection>,
    buses: Vec<&'a Bus>,
    flows: &'a [FlowSpec],
    components: &'a [Component],
}

impl ScenarioConfig {
    /// Self-contained document in SI units with series inlined. Loading it
    /// yields a structurally identical scenario.
    pub fn to_toml(&self) -> String {
        let net = &self.network;
        let doc = DocumentOut {
            schema_version: &self.schema_version,
            name: &self.name,
            objective: self.objective,
            time: TimeSection { start: net.grid.start(), step: f64::from(net.grid.step_seconds()), steps: net.grid.steps() },
            solver: SolverSection {
                feasibility: self.tolerances.feasibility,
                optimality: self.tolerances.optimality,
                integrality: self.tolerances.integrality,
            },
            circuits: net
                .circuits
                .iter()
                .map(|c| CircuitSection {
                    id: c.id.clone(),
                    levels: (0..c.ladder.len()).map(|n| c.ladder.level(n).as_kelvin()).collect(),
                    medium: Some(MediumSection { density: c.medium.density(), heat_capacity: c.medium.heat_capacity() }),
                })
                .collect(),
            buses: net.buses.iter().filter(|b| matches!(b.carrier, Carrier::Electricity | Carrier::Environment)).collect(),
            flows: &net.flows,
            components: &net.components,
        };
        toml::to_string(&doc).expect("scenario documents always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = "1.0.0"
name = "minimal"
objective = "price"

[time]
start = 2017-02-01T00:00:00Z
step = "1 h"
steps = 2

[[buses]]
id = "el"
carrier = "electricity"

[[flows]]
id = "grid"
to = "el"
price = "50 EUR/MWh"

[[flows]]
id = "load"
from = "el"
fixed = "3 kW"
is_demand = true
"#;

    #[test]
    fn minimal_document_loads() {
        let cfg = load_scenario_str(MINIMAL, Path::new("."), Path::new("minimal.toml")).unwrap();
        assert_eq!(cfg.network.grid.steps(), 2);
        assert_eq!(cfg.network.flows[1].fixed, Some(3000.0.into()));
        assert_eq!(cfg.network.flows[0].price, (50.0 / 3.6e9).into());
    }

    #[test]
    fn unknown_keys_are_located() {
        let text = MINIMAL.replace("is_demand = true", "is_demand = true\ncolour = 1");
        let err = load_scenario_str(&text, Path::new("."), Path::new("x.toml")).unwrap_err();
        assert!(err.to_string().starts_with("flows[1] (load)"), "{err}");
    }

    #[test]
    fn major_version_is_enforced() {
        let text = MINIMAL.replace("1.0.0", "2.0.0");
        assert!(matches!(load_scenario_str(&text, Path::new("."), Path::new("x.toml")), Err(ScenarioError::Schema { .. })));
    }

    #[test]
    fn missing_series_file_is_named() {
        let text = MINIMAL.replace("\"3 kW\"", "{ series = \"nowhere.csv\", column = \"load\", unit = \"kW\" }");
        let err = load_scenario_str(&text, Path::new("/nonexistent"), Path::new("x.toml")).unwrap_err();
        assert!(err.to_string().contains("nowhere.csv"), "{err}");
    }

    #[test]
    fn document_round_trip() {
        let cfg = load_scenario_str(MINIMAL, Path::new("."), Path::new("minimal.toml")).unwrap();
        let again = load_scenario_str(&cfg.to_toml(), Path::new("."), Path::new("again.toml")).unwrap();
        assert_eq!(cfg, again);
    }
}
