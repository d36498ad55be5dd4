use std::collections::BTreeMap;

use super::compile::{compile, CompiledModel};
use super::{NetworkError, NetworkModel, ObjectiveKind, TimeGrid};
use crate::components::split_surface_overestimate;
use crate::lp::{solve_milp_with, SolveResult, SolverTolerances};

/// Largest bus imbalance accepted when reading back a solution, in W.
pub const BALANCE_TOLERANCE: f64 = 1e-6;

/// Optimal dispatch in physical units.
#[derive(Debug, Clone, PartialEq)]
pub struct DispatchSolution {
    pub grid: TimeGrid,
    pub objective_kind: ObjectiveKind,
    /// Objective value including constant terms (EUR or J).
    pub objective: f64,
    /// Power per flow and step in W.
    pub flows: BTreeMap<String, Vec<f64>>,
    /// Volume per storage, layer (reference layer first) and boundary step, in m³.
    pub storage: BTreeMap<String, Vec<Vec<f64>>>,
    /// Split-tank surface overestimate per storage and boundary step, in m².
    pub surface_overestimate: BTreeMap<String, Vec<f64>>,
}

impl DispatchSolution {
    pub fn flow(&self, id: &str) -> Option<&[f64]> {
        self.flows.get(id).map(Vec::as_slice)
    }

    /// Total energy of a flow over the horizon in J.
    pub fn energy(&self, id: &str) -> Option<f64> {
        let dt = self.grid.dt();
        self.flows.get(id).map(|s| s.iter().sum::<f64>() * dt)
    }
}

/// Map an optimal solver result back onto flows and storage layers and
/// re-check every bus balance.
pub fn extract_solution(result: &SolveResult, model: &CompiledModel, grid: &TimeGrid) -> Result<DispatchSolution, NetworkError> {
    if !result.is_optimal() {
        return Err(NetworkError::NotOptimal(result.status));
    }
    let x = &result.values;
    let constraints = model.program.constraints();
    for (b, rows) in model.bus_rows.iter().enumerate() {
        for (t, row) in rows.iter().enumerate() {
            if let Some(r) = row {
                let residual = constraints[*r].activity(x);
                if residual.abs() > BALANCE_TOLERANCE || !residual.is_finite() {
                    return Err(NetworkError::Balance { bus: model.bus_ids[b].clone(), step: t, residual });
                }
            }
        }
    }
    let flows = model.flows.iter().map(|f| (f.id.clone(), f.series.iter().map(|e| e.eval(x)).collect())).collect();
    let mut storage = BTreeMap::new();
    let mut surface_overestimate = BTreeMap::new();
    for s in &model.storages {
        let layers: Vec<Vec<f64>> = s.volumes.iter().map(|layer| layer.iter().map(|e| e.eval(x)).collect()).collect();
        if let Some(geo) = s.split_overestimate {
            let series = (0..layers[0].len())
                .map(|t| {
                    let v: Vec<f64> = layers.iter().map(|l| l[t]).collect();
                    split_surface_overestimate(geo.radius, geo.total_volume, &v)
                })
                .collect();
            surface_overestimate.insert(s.id.clone(), series);
        }
        storage.insert(s.id.clone(), layers);
    }
    Ok(DispatchSolution {
        grid: grid.clone(),
        objective_kind: model.objective,
        objective: result.objective + model.objective_offset,
        flows,
        storage,
        surface_overestimate,
    })
}

/// Compile, solve and read back `net` in one go.
pub fn solve_network(
    net: &NetworkModel,
    objective: ObjectiveKind,
    tolerances: &SolverTolerances,
) -> Result<(CompiledModel, DispatchSolution), NetworkError> {
    let model = compile(net, objective)?;
    let result = solve_milp_with(&model.program, tolerances)?;
    let solution = extract_solution(&result, &model, &net.grid)?;
    Ok((model, solution))
}
