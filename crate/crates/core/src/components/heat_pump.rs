use serde::{Deserialize, Serialize};

use super::component_error;
use crate::lp::ConstraintSense;
use crate::network::{
    check_nonnegative, supply_bus_id, Expression, FlowKind, FlowRecord, ModelBuilder, NetworkError, NetworkModel,
    Profile,
};
use crate::thermo::{heat_pump_cop, Temperature};

/// Where a heat pump takes its low-temperature heat from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatPumpSource {
    pub bus: String,
    /// Source temperature in K.
    pub temperature: Profile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatPumpSink {
    pub circuit: String,
    pub level: usize,
}

/// Electric heat pump with a COP at a fixed fraction of the Carnot COP.
///
/// Every (source, sink) pair gets its own electricity variable per step.
/// Heat out is `COP·el`; the source gives up `(COP − 1)·el`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatPump {
    pub id: String,
    pub electricity_bus: String,
    pub sources: Vec<HeatPumpSource>,
    pub sinks: Vec<HeatPumpSink>,
    /// Thermal output capacity in W, shared by all pairs.
    pub capacity: Profile,
    pub quality: f64,
}

impl HeatPump {
    /// COP per `[source][sink][step]`.
    pub fn cops(&self, net: &NetworkModel) -> Result<Vec<Vec<Vec<f64>>>, NetworkError> {
        let steps = net.grid.steps();
        let mut out = Vec::with_capacity(self.sources.len());
        for (i, src) in self.sources.iter().enumerate() {
            let mut per_sink = Vec::with_capacity(self.sinks.len());
            for sink in &self.sinks {
                let t_sink = net.require_level(&self.id, &sink.circuit, sink.level)?.ladder.level(sink.level);
                let mut series = Vec::with_capacity(steps);
                for t in 0..steps {
                    let t_src = Temperature::kelvin(src.temperature.at(t))
                        .map_err(|source| NetworkError::Thermo { context: format!("{} source {i}", self.id), source })?;
                    let cop = heat_pump_cop(t_src, t_sink, self.quality).map_err(|e| {
                        component_error(&self.id, format!("source {i} to {}_l{} at step {t}: {e}", sink.circuit, sink.level))
                    })?;
                    series.push(cop);
                }
                per_sink.push(series);
            }
            out.push(per_sink);
        }
        Ok(out)
    }

    pub(crate) fn validate(&self, net: &NetworkModel) -> Result<Vec<Vec<Vec<f64>>>, NetworkError> {
        net.require_bus(&self.id, &self.electricity_bus)?;
        if self.sources.is_empty() || self.sinks.is_empty() {
            return Err(component_error(&self.id, "needs at least one source and one sink"));
        }
        for (i, src) in self.sources.iter().enumerate() {
            net.require_bus(&self.id, &src.bus)?;
            src.temperature.validate(&net.grid, &format!("{} source {i} temperature", self.id))?;
        }
        check_nonnegative(&self.capacity, &net.grid, &format!("{} capacity", self.id))?;
        self.cops(net)
    }

    pub(crate) fn emit(&self, b: &mut ModelBuilder<'_>) -> Result<(), NetworkError> {
        let cops = self.validate(b.net)?;
        let steps = b.steps();
        let el_bus = b.bus(&self.id, &self.electricity_bus)?;
        let mut capacity_terms = vec![Vec::new(); steps];
        for (i, src) in self.sources.iter().enumerate() {
            let src_bus = b.bus(&self.id, &src.bus)?;
            for (j, sink) in self.sinks.iter().enumerate() {
                let sink_bus = b.bus(&self.id, &supply_bus_id(&sink.circuit, sink.level))?;
                let cop = &cops[i][j];
                let mut vars = Vec::with_capacity(steps);
                for t in 0..steps {
                    let v = b.variable(format!("hp_{}_{i}_{j}_t{t}", self.id), 0.0, f64::INFINITY)?;
                    b.tap(el_bus, t, v, -1.0);
                    b.tap(sink_bus, t, v, cop[t]);
                    b.tap(src_bus, t, v, -(cop[t] - 1.0));
                    capacity_terms[t].push((v, cop[t]));
                    vars.push(v);
                }
                let pair = format!("{}_{}_l{}", src.bus, sink.circuit, sink.level);
                b.record_plain(format!("{}_el_{pair}", self.id), FlowKind::Transfer, &vars);
                for (label, factor) in [("heat", 0.0), ("source", -1.0)] {
                    b.record_flow(FlowRecord {
                        id: format!("{}_{label}_{pair}", self.id),
                        kind: FlowKind::Transfer,
                        series: vars.iter().zip(cop).map(|(&v, &c)| Expression::scaled(v, c + factor)).collect(),
                        price: vec![0.0; steps],
                        exergy: vec![0.0; steps],
                    });
                }
            }
        }
        for (t, terms) in capacity_terms.into_iter().enumerate() {
            b.constraint(format!("cap_{}_t{t}", self.id), terms, ConstraintSense::LessEqual, self.capacity.at(t))?;
        }
        Ok(())
    }
}
