//! Buses, directed flows and heat circuits, compiled into a linear program
//! with one balance row per bus and time step.

mod compile;
mod solution;

use std::collections::HashSet;
use std::fmt;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::components::Component;
use crate::lp::LpError;
use crate::thermo::{Medium, TemperatureLadder, ThermoError};

pub use compile::{compile, CompiledModel, Expression, FlowKind, FlowRecord, ModelBuilder, SplitGeometry, StorageRecord};
pub use solution::{extract_solution, solve_network, DispatchSolution, BALANCE_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("invalid time grid: {0}")]
    Grid(String),
    #[error("{context}: series has {found} values, grid has {expected} steps")]
    GridMismatch { context: String, expected: usize, found: usize },
    #[error("{context}: non-finite value at step {step}")]
    NonFinite { context: String, step: usize },
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("invalid id {0:?}: ids must match [A-Za-z][A-Za-z0-9_]*")]
    InvalidId(String),
    #[error("{context}: unknown bus {bus:?}")]
    DanglingBus { context: String, bus: String },
    #[error("{context}: unknown heat circuit {circuit:?}")]
    UnknownCircuit { context: String, circuit: String },
    #[error("{context}: level {level} outside circuit {circuit:?} with {levels} levels")]
    UnknownLevel { context: String, circuit: String, level: usize, levels: usize },
    #[error("{context}: {message}")]
    Component { context: String, message: String },
    #[error("{context}: {source}")]
    Thermo { context: String, source: ThermoError },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("solution is not optimal ({0})")]
    NotOptimal(crate::lp::SolveStatus),
    #[error("bus {bus} at step {step}: balance residual {residual} W exceeds tolerance")]
    Balance { bus: String, step: usize, residual: f64 },
}

/// Uniform time discretisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    start: DateTime<Utc>,
    step_seconds: u32,
    steps: usize,
}

impl TimeGrid {
    pub fn new(start: DateTime<Utc>, step_seconds: u32, steps: usize) -> Result<Self, NetworkError> {
        if step_seconds == 0 {
            return Err(NetworkError::Grid("step must be positive".into()));
        }
        if steps == 0 {
            return Err(NetworkError::Grid("at least one step is required".into()));
        }
        Ok(Self { start, step_seconds, steps })
    }

    /// Hourly grid starting at the Unix epoch; handy for tests.
    pub fn hourly(steps: usize) -> Result<Self, NetworkError> {
        Self::new(DateTime::<Utc>::UNIX_EPOCH, 3600, steps)
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.start
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step_seconds(&self) -> u32 {
        self.step_seconds
    }

    /// Step length Δt in seconds.
    pub fn dt(&self) -> f64 {
        f64::from(self.step_seconds)
    }

    pub fn timestamp(&self, t: usize) -> DateTime<Utc> {
        self.start + Duration::seconds(i64::from(self.step_seconds) * t as i64)
    }

    /// Timestamps of steps `0..=N`, including the end of the last step.
    pub fn boundaries(&self) -> Vec<DateTime<Utc>> {
        (0..=self.steps).map(|t| self.timestamp(t)).collect()
    }
}

/// Values aligned to a time grid, stored in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    /// SI unit of `values` (for example `W`, `K`, `EUR/J`).
    pub unit: String,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, unit: impl Into<String>) -> Self {
        Self { values, unit: unit.into() }
    }
}

/// A per-step parameter: either constant or a series on the model grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Profile {
    Constant(f64),
    Series(TimeSeries),
}

impl Default for Profile {
    fn default() -> Self {
        Profile::Constant(0.0)
    }
}

impl Profile {
    pub fn zero() -> Self {
        Profile::Constant(0.0)
    }

    pub fn series(values: Vec<f64>, unit: &str) -> Self {
        Profile::Series(TimeSeries::new(values, unit))
    }

    pub fn at(&self, t: usize) -> f64 {
        match self {
            Profile::Constant(v) => *v,
            Profile::Series(s) => s.values[t],
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Profile::Constant(v) => *v == 0.0,
            Profile::Series(s) => s.values.iter().all(|v| *v == 0.0),
        }
    }

    pub fn values(&self, steps: usize) -> Vec<f64> {
        (0..steps).map(|t| self.at(t)).collect()
    }

    /// Check length and finiteness against `grid`.
    pub fn validate(&self, grid: &TimeGrid, context: &str) -> Result<(), NetworkError> {
        match self {
            Profile::Constant(v) if !v.is_finite() => Err(NetworkError::NonFinite { context: context.into(), step: 0 }),
            Profile::Constant(_) => Ok(()),
            Profile::Series(s) => {
                if s.values.len() != grid.steps() {
                    return Err(NetworkError::GridMismatch {
                        context: context.into(),
                        expected: grid.steps(),
                        found: s.values.len(),
                    });
                }
                match s.values.iter().position(|v| !v.is_finite()) {
                    Some(step) => Err(NetworkError::NonFinite { context: context.into(), step }),
                    None => Ok(()),
                }
            }
        }
    }

    fn validate_nonnegative(&self, grid: &TimeGrid, context: &str) -> Result<(), NetworkError> {
        self.validate(grid, context)?;
        match (0..grid.steps()).find(|&t| self.at(t) < 0.0) {
            Some(t) => Err(NetworkError::Component {
                context: context.into(),
                message: format!("negative value {} at step {t}", self.at(t)),
            }),
            None => Ok(()),
        }
    }
}

impl From<f64> for Profile {
    fn from(v: f64) -> Self {
        Profile::Constant(v)
    }
}

/// What a bus balances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Carrier {
    Electricity,
    /// Heat stored or transported at a ladder level, measured against the
    /// circuit's reference temperature.
    Heat { circuit: String, level: usize },
    /// Fresh source heat offered at a level; only the rise cascade may
    /// consume it.
    Supply { circuit: String, level: usize },
    /// Low-temperature environmental heat (soil, air, water).
    Environment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: String,
    pub carrier: Carrier,
}

/// A directed flow between buses. `None` on either end is the system
/// boundary, so a flow with `from: None` is a source and one with
/// `to: None` is a sink.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
    /// Upper bound in W; `None` is unbounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<Profile>,
    /// Fixes the flow to this value in every step (must-serve demands).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<Profile>,
    /// Cost per energy in EUR/J.
    #[serde(default)]
    pub price: Profile,
    /// Exergy rating in J/J.
    #[serde(default)]
    pub exergy: Profile,
    /// Served demand for KPI purposes.
    #[serde(default)]
    pub is_demand: bool,
}

impl FlowSpec {
    pub fn new(id: impl Into<String>, from: Option<&str>, to: Option<&str>) -> Self {
        Self {
            id: id.into(),
            from: from.map(str::to_string),
            to: to.map(str::to_string),
            capacity: None,
            fixed: None,
            price: Profile::zero(),
            exergy: Profile::zero(),
            is_demand: false,
        }
    }

    pub fn with_capacity(mut self, capacity: impl Into<Profile>) -> Self {
        self.capacity = Some(capacity.into());
        self
    }

    pub fn with_fixed(mut self, value: impl Into<Profile>) -> Self {
        self.fixed = Some(value.into());
        self
    }

    pub fn with_price(mut self, price: impl Into<Profile>) -> Self {
        self.price = price.into();
        self
    }

    pub fn with_exergy(mut self, exergy: impl Into<Profile>) -> Self {
        self.exergy = exergy.into();
        self
    }

    pub fn as_demand(mut self) -> Self {
        self.is_demand = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Price,
    Exergy,
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::Price => "price",
            ObjectiveKind::Exergy => "exergy",
        })
    }
}

impl std::str::FromStr for ObjectiveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "price" | "cost" => Ok(ObjectiveKind::Price),
            "exergy" => Ok(ObjectiveKind::Exergy),
            other => Err(format!("unknown objective {other:?} (expected price or exergy)")),
        }
    }
}

/// A set of heat levels sharing one reference temperature and medium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatCircuit {
    pub id: String,
    pub ladder: TemperatureLadder,
    pub medium: Medium,
}

pub(crate) fn valid_id(id: &str) -> bool {
    let mut chars = id.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Bus id of heat level `level` in `circuit`.
pub fn heat_bus_id(circuit: &str, level: usize) -> String {
    format!("{circuit}_h{level}")
}

/// Bus id of fresh supply at `level` in `circuit`.
pub fn supply_bus_id(circuit: &str, level: usize) -> String {
    format!("{circuit}_s{level}")
}

/// Declarative description of a supply system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub grid: TimeGrid,
    pub circuits: Vec<HeatCircuit>,
    pub buses: Vec<Bus>,
    pub flows: Vec<FlowSpec>,
    pub components: Vec<Component>,
}

impl NetworkModel {
    pub fn new(grid: TimeGrid) -> Self {
        Self { grid, circuits: Vec::new(), buses: Vec::new(), flows: Vec::new(), components: Vec::new() }
    }

    /// Register a heat circuit. Heat and supply buses for every level above
    /// the reference are created with it.
    pub fn add_circuit(&mut self, id: &str, ladder: TemperatureLadder, medium: Medium) -> &mut Self {
        for n in 1..ladder.len() {
            self.buses.push(Bus { id: heat_bus_id(id, n), carrier: Carrier::Heat { circuit: id.into(), level: n } });
            self.buses.push(Bus { id: supply_bus_id(id, n), carrier: Carrier::Supply { circuit: id.into(), level: n } });
        }
        self.circuits.push(HeatCircuit { id: id.into(), ladder, medium });
        self
    }

    pub fn add_bus(&mut self, id: &str, carrier: Carrier) -> &mut Self {
        self.buses.push(Bus { id: id.into(), carrier });
        self
    }

    pub fn add_flow(&mut self, flow: FlowSpec) -> &mut Self {
        self.flows.push(flow);
        self
    }

    pub fn add_component(&mut self, component: impl Into<Component>) -> &mut Self {
        self.components.push(component.into());
        self
    }

    pub fn circuit(&self, id: &str) -> Option<&HeatCircuit> {
        self.circuits.iter().find(|c| c.id == id)
    }

    pub fn bus(&self, id: &str) -> Option<&Bus> {
        self.buses.iter().find(|b| b.id == id)
    }

    pub(crate) fn require_circuit(&self, context: &str, id: &str) -> Result<&HeatCircuit, NetworkError> {
        self.circuit(id).ok_or_else(|| NetworkError::UnknownCircuit { context: context.into(), circuit: id.into() })
    }

    pub(crate) fn require_level(&self, context: &str, circuit: &str, level: usize) -> Result<&HeatCircuit, NetworkError> {
        let c = self.require_circuit(context, circuit)?;
        if level == 0 || level >= c.ladder.len() {
            return Err(NetworkError::UnknownLevel {
                context: context.into(),
                circuit: circuit.into(),
                level,
                levels: c.ladder.len(),
            });
        }
        Ok(c)
    }

    pub(crate) fn require_bus(&self, context: &str, id: &str) -> Result<(), NetworkError> {
        match self.bus(id) {
            Some(_) => Ok(()),
            None => Err(NetworkError::DanglingBus { context: context.into(), bus: id.into() }),
        }
    }

    /// Structural checks that do not need the compiler: unique ids, known
    /// buses, series on the grid.
    pub fn validate(&self) -> Result<(), NetworkError> {
        let mut ids = HashSet::new();
        let mut claim = |id: &str| -> Result<(), NetworkError> {
            if !valid_id(id) {
                return Err(NetworkError::InvalidId(id.into()));
            }
            if !ids.insert(id.to_string()) {
                return Err(NetworkError::DuplicateId(id.into()));
            }
            Ok(())
        };
        for c in &self.circuits {
            claim(&c.id)?;
        }
        for b in &self.buses {
            claim(&b.id)?;
        }
        for f in &self.flows {
            claim(&f.id)?;
        }
        for c in &self.components {
            claim(c.id())?;
        }
        for f in &self.flows {
            let ctx = format!("flow {}", f.id);
            for bus in f.from.iter().chain(f.to.iter()) {
                self.require_bus(&ctx, bus)?;
            }
            if let Some(cap) = &f.capacity {
                cap.validate_nonnegative(&self.grid, &format!("{ctx} capacity"))?;
            }
            if let Some(fixed) = &f.fixed {
                fixed.validate_nonnegative(&self.grid, &format!("{ctx} fixed value"))?;
            }
            f.price.validate(&self.grid, &format!("{ctx} price"))?;
            f.exergy.validate(&self.grid, &format!("{ctx} exergy"))?;
        }
        for c in &self.components {
            c.validate(self)?;
        }
        Ok(())
    }
}

pub(crate) fn check_nonnegative(p: &Profile, grid: &TimeGrid, context: &str) -> Result<(), NetworkError> {
    p.validate_nonnegative(grid, context)
}
