use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::network::{CompiledModel, DispatchSolution, FlowKind, ObjectiveKind};

const J_PER_MWH: f64 = 3.6e9;

/// Key performance indicators of one dispatch. Energies are totals over
/// the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiReport {
    pub objective: ObjectiveKind,
    pub horizon_hours: f64,
    /// Heat and electricity delivered to demands.
    pub served_energy_mwh: f64,
    /// Priced cost of all flows; negative with enough feed-in revenue.
    pub cost_eur: f64,
    pub cost_eur_per_mwh: f64,
    /// Exergy-weighted input of all flows.
    pub exergy_mwh: f64,
    pub exergy_per_energy: f64,
    /// Solar heat per delivery temperature, keyed like `"303.15 K"`.
    pub solar_heat_mwh: BTreeMap<String, f64>,
    pub pump_electricity_mwh: f64,
}

/// Compute KPIs of `solution`, taking prices, exergy weights and flow roles
/// from the compiled model it was solved from.
pub fn compute_kpis(solution: &DispatchSolution, model: &CompiledModel) -> Result<KpiReport, ScenarioError> {
    let dt = solution.grid.dt();
    let mut served = 0.0;
    let mut cost = 0.0;
    let mut exergy = 0.0;
    let mut solar = BTreeMap::new();
    let mut pump = 0.0;
    for record in &model.flows {
        let series = solution
            .flow(&record.id)
            .ok_or_else(|| ScenarioError::Kpi(format!("solution has no flow {}", record.id)))?;
        let energy: f64 = series.iter().sum::<f64>() * dt;
        cost += series.iter().zip(&record.price).map(|(p, w)| p * w).sum::<f64>() * dt;
        exergy += series.iter().zip(&record.exergy).map(|(p, w)| p * w).sum::<f64>() * dt;
        match record.kind {
            FlowKind::Demand => served += energy,
            FlowKind::Solar { temperature } => *solar.entry(format!("{temperature:.2} K")).or_insert(0.0) += energy / J_PER_MWH,
            FlowKind::PumpElectricity => pump += energy,
            FlowKind::Transfer => {}
        }
    }
    if served <= 0.0 {
        return Err(ScenarioError::Kpi("no demand energy was served".into()));
    }
    let served_mwh = served / J_PER_MWH;
    Ok(KpiReport {
        objective: solution.objective_kind,
        horizon_hours: solution.grid.steps() as f64 * dt / 3600.0,
        served_energy_mwh: served_mwh,
        cost_eur: cost,
        cost_eur_per_mwh: cost / served_mwh,
        exergy_mwh: exergy / J_PER_MWH,
        exergy_per_energy: exergy / served,
        solar_heat_mwh: solar,
        pump_electricity_mwh: pump / J_PER_MWH,
    })
}
