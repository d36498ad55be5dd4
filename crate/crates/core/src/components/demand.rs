use serde::{Deserialize, Serialize};

use super::component_error;
use crate::lp::ConstraintSense;
use crate::network::{check_nonnegative, heat_bus_id, Expression, FlowKind, FlowRecord, ModelBuilder, NetworkError, NetworkModel, Profile};

/// A level a demand may draw from, with the pump electricity it needs per
/// unit of delivered heat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandDraw {
    pub level: usize,
    pub pump_fraction: f64,
}

/// Must-serve heat demand.
///
/// Heat drawn at level `j` cools to the return level `m`: the share
/// `r_{j,m}` serves the demand and the rest returns to level `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Demand {
    pub id: String,
    pub circuit: String,
    /// Demand in W.
    pub demand: Profile,
    pub service_level: usize,
    pub return_level: usize,
    /// Levels the demand may draw from; empty means the service level only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub draws: Vec<DemandDraw>,
    /// Bus supplying pump electricity; required when any pump fraction is
    /// positive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub electricity_bus: Option<String>,
}

impl Demand {
    fn effective_draws(&self) -> Vec<DemandDraw> {
        if self.draws.is_empty() {
            vec![DemandDraw { level: self.service_level, pump_fraction: 0.0 }]
        } else {
            self.draws.clone()
        }
    }

    pub(crate) fn validate(&self, net: &NetworkModel) -> Result<(), NetworkError> {
        let c = net.require_level(&self.id, &self.circuit, self.service_level)?;
        if self.return_level >= self.service_level {
            return Err(component_error(
                &self.id,
                format!("return level {} must lie below service level {}", self.return_level, self.service_level),
            ));
        }
        check_nonnegative(&self.demand, &net.grid, &format!("{} demand", self.id))?;
        let mut seen = Vec::new();
        for d in self.effective_draws() {
            if d.level < self.service_level || d.level >= c.ladder.len() {
                return Err(component_error(&self.id, format!("cannot draw from level {}", d.level)));
            }
            if seen.contains(&d.level) {
                return Err(component_error(&self.id, format!("level {} listed twice", d.level)));
            }
            seen.push(d.level);
            if !(d.pump_fraction >= 0.0 && d.pump_fraction.is_finite()) {
                return Err(component_error(&self.id, format!("pump fraction must be non-negative, got {}", d.pump_fraction)));
            }
            if d.pump_fraction > 0.0 && self.electricity_bus.is_none() {
                return Err(component_error(&self.id, "pump electricity needs an electricity bus"));
            }
        }
        if let Some(bus) = &self.electricity_bus {
            net.require_bus(&self.id, bus)?;
        }
        Ok(())
    }

    pub(crate) fn emit(&self, b: &mut ModelBuilder<'_>) -> Result<(), NetworkError> {
        let ladder = b.net.require_circuit(&self.id, &self.circuit)?.ladder.clone();
        let steps = b.steps();
        let m = self.return_level;
        let ret = if m >= 1 { Some(b.bus(&self.id, &heat_bus_id(&self.circuit, m))?) } else { None };
        let el = self.electricity_bus.as_deref().map(|id| b.bus(&self.id, id)).transpose()?;
        let mut served = vec![Expression::default(); steps];
        let mut pump = vec![Expression::default(); steps];
        for d in self.effective_draws() {
            let r = ladder.ratio(d.level, m).map_err(|source| NetworkError::Thermo { context: self.id.clone(), source })?;
            let from = b.bus(&self.id, &heat_bus_id(&self.circuit, d.level))?;
            let mut vars = Vec::with_capacity(steps);
            for t in 0..steps {
                let v = b.variable(format!("d_{}_l{}_t{t}", self.id, d.level), 0.0, f64::INFINITY)?;
                b.tap(from, t, v, -1.0);
                if let Some(ret) = ret {
                    b.tap(ret, t, v, 1.0 - r);
                }
                if let (Some(el), true) = (el, d.pump_fraction > 0.0) {
                    b.tap(el, t, v, -d.pump_fraction * r);
                    pump[t].terms.push((v, d.pump_fraction * r));
                }
                served[t].terms.push((v, r));
                vars.push(v);
            }
            b.record_plain(format!("{}_draw_l{}", self.id, d.level), FlowKind::Transfer, &vars);
        }
        for (t, expr) in served.iter().enumerate() {
            b.constraint(format!("dem_{}_t{t}", self.id), expr.terms.clone(), ConstraintSense::Equal, self.demand.at(t))?;
        }
        b.record_flow(FlowRecord {
            id: format!("{}_served", self.id),
            kind: FlowKind::Demand,
            series: served,
            price: vec![0.0; steps],
            exergy: vec![0.0; steps],
        });
        if pump.iter().any(|e| !e.terms.is_empty()) {
            b.record_flow(FlowRecord {
                id: format!("{}_pump", self.id),
                kind: FlowKind::PumpElectricity,
                series: pump,
                price: vec![0.0; steps],
                exergy: vec![0.0; steps],
            });
        }
        Ok(())
    }
}
