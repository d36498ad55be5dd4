use std::collections::HashMap;

use super::{NetworkError, NetworkModel, ObjectiveKind};
use crate::lp::{ConstraintSense, LinearProgram, VariableId};

/// Linear expression `Σ coef·var + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Expression {
    pub terms: Vec<(VariableId, f64)>,
    pub constant: f64,
}

impl Expression {
    pub fn var(v: VariableId) -> Self {
        Self { terms: vec![(v, 1.0)], constant: 0.0 }
    }

    pub fn scaled(v: VariableId, coef: f64) -> Self {
        Self { terms: vec![(v, coef)], constant: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(v, a)| a * values[v.index()]).sum::<f64>()
    }
}

/// Role of a reported flow, used by the KPI report.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowKind {
    Transfer,
    /// Served demand (heat or electricity).
    Demand,
    /// Solar heat delivered at the given temperature (K).
    Solar { temperature: f64 },
    /// Electricity for pumping heat to demands.
    PumpElectricity,
}

/// A reported power series in W, one expression per step, with the weights
/// it carries in the objective.
#[derive(Debug, Clone)]
pub struct FlowRecord {
    pub id: String,
    pub kind: FlowKind,
    pub series: Vec<Expression>,
    /// EUR/J per step.
    pub price: Vec<f64>,
    /// J/J per step.
    pub exergy: Vec<f64>,
}

/// Per-layer volume series (m³) of one storage, `N + 1` entries per layer.
#[derive(Debug, Clone)]
pub struct StorageRecord {
    pub id: String,
    pub volumes: Vec<Vec<Expression>>,
    /// Nominal total volume V.
    pub total_volume: f64,
    /// Surface overestimate of the split representation per boundary step,
    /// when applicable.
    pub split_overestimate: Option<SplitGeometry>,
}

/// Tank geometry needed to recompute the split-tank surface overestimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitGeometry {
    pub radius: f64,
    pub total_volume: f64,
}

/// Incremental program builder shared by the flow compiler and the heat
/// components.
pub struct ModelBuilder<'a> {
    pub net: &'a NetworkModel,
    pub program: LinearProgram,
    bus_index: HashMap<String, usize>,
    bus_ids: Vec<String>,
    /// Bus balance taps, indexed `[bus][step]`.
    taps: Vec<Vec<Vec<(VariableId, f64)>>>,
    flows: Vec<FlowRecord>,
    storages: Vec<StorageRecord>,
}

impl<'a> ModelBuilder<'a> {
    fn new(net: &'a NetworkModel) -> Self {
        let steps = net.grid.steps();
        let bus_ids: Vec<String> = net.buses.iter().map(|b| b.id.clone()).collect();
        let bus_index = bus_ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        Self {
            net,
            program: LinearProgram::new(),
            bus_index,
            taps: vec![vec![Vec::new(); steps]; bus_ids.len()],
            bus_ids,
            flows: Vec::new(),
            storages: Vec::new(),
        }
    }

    pub fn steps(&self) -> usize {
        self.net.grid.steps()
    }

    pub fn dt(&self) -> f64 {
        self.net.grid.dt()
    }

    pub fn bus(&self, context: &str, id: &str) -> Result<usize, NetworkError> {
        self.bus_index
            .get(id)
            .copied()
            .ok_or_else(|| NetworkError::DanglingBus { context: context.into(), bus: id.into() })
    }

    pub fn variable(&mut self, name: String, lower: f64, upper: f64) -> Result<VariableId, NetworkError> {
        Ok(self.program.add_continuous(name, lower, upper)?)
    }

    pub fn binary(&mut self, name: String) -> Result<VariableId, NetworkError> {
        Ok(self.program.add_binary(name)?)
    }

    /// Add `coef·var` to the balance of `bus` at step `t` (positive = inflow).
    pub fn tap(&mut self, bus: usize, t: usize, var: VariableId, coef: f64) {
        if coef != 0.0 {
            self.taps[bus][t].push((var, coef));
        }
    }

    pub fn constraint(
        &mut self,
        name: String,
        terms: Vec<(VariableId, f64)>,
        sense: ConstraintSense,
        rhs: f64,
    ) -> Result<usize, NetworkError> {
        Ok(self.program.add_constraint(name, terms, sense, rhs)?)
    }

    pub fn record_flow(&mut self, record: FlowRecord) {
        self.flows.push(record);
    }

    /// Record a single-variable flow without objective weights.
    pub fn record_plain(&mut self, id: String, kind: FlowKind, vars: &[VariableId]) {
        let n = vars.len();
        self.flows.push(FlowRecord {
            id,
            kind,
            series: vars.iter().map(|&v| Expression::var(v)).collect(),
            price: vec![0.0; n],
            exergy: vec![0.0; n],
        });
    }

    pub fn record_storage(&mut self, record: StorageRecord) {
        self.storages.push(record);
    }

    fn finish(mut self, objective: ObjectiveKind) -> Result<CompiledModel, NetworkError> {
        let steps = self.steps();
        let mut bus_rows = Vec::with_capacity(self.bus_ids.len());
        for (b, bus) in self.bus_ids.iter().enumerate() {
            let mut rows = Vec::with_capacity(steps);
            for t in 0..steps {
                let terms = std::mem::take(&mut self.taps[b][t]);
                if terms.is_empty() {
                    rows.push(None);
                    continue;
                }
                let row = self.program.add_constraint(format!("bal_{bus}_t{t}"), terms, ConstraintSense::Equal, 0.0)?;
                rows.push(Some(row));
            }
            bus_rows.push(rows);
        }
        let dt = self.dt();
        let mut coef: HashMap<VariableId, f64> = HashMap::new();
        for f in &self.flows {
            let weights = match objective {
                ObjectiveKind::Price => &f.price,
                ObjectiveKind::Exergy => &f.exergy,
            };
            for (t, expr) in f.series.iter().enumerate() {
                let w = weights[t];
                if w == 0.0 {
                    continue;
                }
                for &(v, a) in &expr.terms {
                    *coef.entry(v).or_insert(0.0) += w * a * dt;
                }
            }
        }
        let mut entries: Vec<_> = coef.into_iter().collect();
        entries.sort_by_key(|e| e.0);
        for (v, c) in entries {
            self.program.set_objective(v, c)?;
        }
        let mut objective_offset = 0.0;
        for f in &self.flows {
            let weights = match objective {
                ObjectiveKind::Price => &f.price,
                ObjectiveKind::Exergy => &f.exergy,
            };
            for (t, expr) in f.series.iter().enumerate() {
                objective_offset += weights[t] * expr.constant * dt;
            }
        }
        Ok(CompiledModel {
            program: self.program,
            objective,
            bus_ids: self.bus_ids,
            bus_rows,
            flows: self.flows,
            storages: self.storages,
            objective_offset,
            steps,
            dt,
        })
    }
}

/// A compiled program together with the map from program variables back to
/// flows, buses and storage layers.
#[derive(Debug, Clone)]
pub struct CompiledModel {
    pub program: LinearProgram,
    pub objective: ObjectiveKind,
    pub bus_ids: Vec<String>,
    /// Balance row index per `[bus][step]`; `None` where nothing touches
    /// the bus.
    pub bus_rows: Vec<Vec<Option<usize>>>,
    pub flows: Vec<FlowRecord>,
    pub storages: Vec<StorageRecord>,
    /// Constant part of the objective not carried by any variable.
    pub objective_offset: f64,
    pub steps: usize,
    pub dt: f64,
}

impl CompiledModel {
    pub fn flow(&self, id: &str) -> Option<&FlowRecord> {
        self.flows.iter().find(|f| f.id == id)
    }

    /// Variables of the flow `id`, one per step, when it maps one-to-one.
    pub fn flow_variables(&self, id: &str) -> Option<Vec<VariableId>> {
        self.flow(id)?
            .series
            .iter()
            .map(|e| match e.terms.as_slice() {
                [(v, a)] if *a == 1.0 && e.constant == 0.0 => Some(*v),
                _ => None,
            })
            .collect()
    }

    /// Reverse map: which flow and step a variable reports, if any.
    pub fn variable_owner(&self, var: VariableId) -> Option<(&str, usize)> {
        self.flows.iter().find_map(|f| {
            f.series.iter().position(|e| e.terms.len() == 1 && e.terms[0].0 == var).map(|t| (f.id.as_str(), t))
        })
    }
}

/// Compile `net` into a linear program minimising `objective`.
pub fn compile(net: &NetworkModel, objective: ObjectiveKind) -> Result<CompiledModel, NetworkError> {
    net.validate()?;
    let mut b = ModelBuilder::new(net);
    let steps = b.steps();
    for f in &net.flows {
        let mut vars = Vec::with_capacity(steps);
        let from = f.from.as_deref().map(|id| b.bus(&f.id, id)).transpose()?;
        let to = f.to.as_deref().map(|id| b.bus(&f.id, id)).transpose()?;
        for t in 0..steps {
            let (lo, hi) = match (&f.fixed, &f.capacity) {
                (Some(v), _) => (v.at(t), v.at(t)),
                (None, Some(c)) => (0.0, c.at(t)),
                (None, None) => (0.0, f64::INFINITY),
            };
            let v = b.variable(format!("f_{}_t{t}", f.id), lo, hi)?;
            if let Some(from) = from {
                b.tap(from, t, v, -1.0);
            }
            if let Some(to) = to {
                b.tap(to, t, v, 1.0);
            }
            vars.push(v);
        }
        b.record_flow(FlowRecord {
            id: f.id.clone(),
            kind: if f.is_demand { FlowKind::Demand } else { FlowKind::Transfer },
            series: vars.iter().map(|&v| Expression::var(v)).collect(),
            price: f.price.values(steps),
            exergy: f.exergy.values(steps),
        });
    }
    for c in &net.circuits {
        crate::components::emit_rise_cascade(&mut b, c)?;
    }
    for c in &net.components {
        c.emit(&mut b)?;
    }
    b.finish(objective)
}
