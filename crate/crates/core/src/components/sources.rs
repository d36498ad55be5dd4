use serde::{Deserialize, Serialize};

use super::component_error;
use crate::lp::ConstraintSense;
use crate::network::{
    check_nonnegative, heat_bus_id, supply_bus_id, Expression, FlowKind, FlowRecord, ModelBuilder, NetworkError,
    NetworkModel, Profile,
};

/// A source whose efficiency does not depend on the output temperature
/// (boiler, heating rod). It heats straight to the top level of its
/// circuit; the downshift flows make every lower level reachable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantEfficiencySource {
    pub id: String,
    pub circuit: String,
    /// Bus the input (fuel or electricity) is drawn from.
    pub input_bus: String,
    pub efficiency: f64,
    /// Input capacity in W.
    pub capacity: Profile,
}

impl ConstantEfficiencySource {
    pub(crate) fn validate(&self, net: &NetworkModel) -> Result<(), NetworkError> {
        net.require_circuit(&self.id, &self.circuit)?;
        net.require_bus(&self.id, &self.input_bus)?;
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(component_error(&self.id, format!("efficiency must lie in (0, 1], got {}", self.efficiency)));
        }
        check_nonnegative(&self.capacity, &net.grid, &format!("{} capacity", self.id))
    }

    pub(crate) fn emit(&self, b: &mut ModelBuilder<'_>) -> Result<(), NetworkError> {
        let top = b.net.require_circuit(&self.id, &self.circuit)?.ladder.top();
        let input = b.bus(&self.id, &self.input_bus)?;
        let heat = b.bus(&self.id, &heat_bus_id(&self.circuit, top))?;
        let mut vars = Vec::with_capacity(b.steps());
        for t in 0..b.steps() {
            let v = b.variable(format!("u_{}_t{t}", self.id), 0.0, self.capacity.at(t))?;
            b.tap(input, t, v, -1.0);
            b.tap(heat, t, v, self.efficiency);
            vars.push(v);
        }
        b.record_plain(format!("{}_input", self.id), FlowKind::Transfer, &vars);
        let n = vars.len();
        b.record_flow(FlowRecord {
            id: format!("{}_heat", self.id),
            kind: FlowKind::Transfer,
            series: vars.iter().map(|&v| Expression::scaled(v, self.efficiency)).collect(),
            price: vec![0.0; n],
            exergy: vec![0.0; n],
        });
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceMode {
    /// Fractional use of several levels in one step.
    #[default]
    Shared,
    /// At most one level per block of steps, enforced with binaries.
    Exclusive,
}

/// One output level of a temperature-dependent source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceTarget {
    pub circuit: String,
    pub level: usize,
    /// Maximum supply at this level in W.
    pub max: Profile,
    #[serde(default)]
    pub price: Profile,
    #[serde(default)]
    pub exergy: Profile,
}

/// A source whose yield falls with the output temperature (solar thermal).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureDependentSource {
    pub id: String,
    pub targets: Vec<SourceTarget>,
    #[serde(default)]
    pub mode: SourceMode,
    /// Steps sharing one binary status in exclusive mode.
    #[serde(default = "one_step")]
    pub block_steps: usize,
}

fn one_step() -> usize {
    1
}

impl TemperatureDependentSource {
    fn temperature(&self, net: &NetworkModel, target: &SourceTarget) -> Result<f64, NetworkError> {
        let c = net.require_level(&self.id, &target.circuit, target.level)?;
        Ok(c.ladder.level(target.level).as_kelvin())
    }

    pub(crate) fn validate(&self, net: &NetworkModel) -> Result<(), NetworkError> {
        if self.targets.is_empty() {
            return Err(component_error(&self.id, "no output levels"));
        }
        if self.block_steps == 0 {
            return Err(component_error(&self.id, "block_steps must be at least 1"));
        }
        let mut by_temperature = Vec::with_capacity(self.targets.len());
        for (i, target) in self.targets.iter().enumerate() {
            let ctx = format!("{} target {i}", self.id);
            check_nonnegative(&target.max, &net.grid, &format!("{ctx} max"))?;
            target.price.validate(&net.grid, &format!("{ctx} price"))?;
            target.exergy.validate(&net.grid, &format!("{ctx} exergy"))?;
            by_temperature.push((self.temperature(net, target)?, i));
        }
        by_temperature.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Supply at a level never exceeds supply at any colder level.
        for pair in by_temperature.windows(2) {
            let ((t_lo, lo), (t_hi, hi)) = (pair[0], pair[1]);
            if t_hi <= t_lo {
                continue;
            }
            for step in 0..net.grid.steps() {
                let (a, b) = (self.targets[lo].max.at(step), self.targets[hi].max.at(step));
                if b > a + 1e-9 * a.abs().max(1.0) {
                    return Err(component_error(
                        &self.id,
                        format!("maximum supply rises with temperature: target {hi} ({b} W) exceeds target {lo} ({a} W) at step {step}"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn emit(&self, b: &mut ModelBuilder<'_>) -> Result<(), NetworkError> {
        let steps = b.steps();
        let mut outputs = Vec::with_capacity(self.targets.len());
        for (i, target) in self.targets.iter().enumerate() {
            let temperature = self.temperature(b.net, target)?;
            let bus = b.bus(&self.id, &supply_bus_id(&target.circuit, target.level))?;
            let mut vars = Vec::with_capacity(steps);
            for t in 0..steps {
                let v = b.variable(format!("q_{}_{i}_t{t}", self.id), 0.0, target.max.at(t))?;
                b.tap(bus, t, v, 1.0);
                vars.push(v);
            }
            b.record_flow(FlowRecord {
                id: format!("{}_{}_l{}", self.id, target.circuit, target.level),
                kind: FlowKind::Solar { temperature },
                series: vars.iter().map(|&v| Expression::var(v)).collect(),
                price: target.price.values(steps),
                exergy: target.exergy.values(steps),
            });
            outputs.push(vars);
        }
        match self.mode {
            SourceMode::Shared => {
                for t in 0..steps {
                    let terms: Vec<_> = self
                        .targets
                        .iter()
                        .zip(&outputs)
                        .filter(|(target, _)| target.max.at(t) > 0.0)
                        .map(|(target, vars)| (vars[t], 1.0 / target.max.at(t)))
                        .collect();
                    if terms.len() > 1 {
                        b.constraint(format!("share_{}_t{t}", self.id), terms, ConstraintSense::LessEqual, 1.0)?;
                    }
                }
            }
            SourceMode::Exclusive => {
                let blocks = steps.div_ceil(self.block_steps);
                for block in 0..blocks {
                    let range = block * self.block_steps..((block + 1) * self.block_steps).min(steps);
                    let mut status = Vec::with_capacity(self.targets.len());
                    for (i, target) in self.targets.iter().enumerate() {
                        if range.clone().all(|t| target.max.at(t) == 0.0) {
                            continue;
                        }
                        let s = b.binary(format!("s_{}_{i}_b{block}", self.id))?;
                        for t in range.clone() {
                            let max = target.max.at(t);
                            if max > 0.0 {
                                b.constraint(
                                    format!("excl_{}_{i}_t{t}", self.id),
                                    vec![(outputs[i][t], 1.0), (s, -max)],
                                    ConstraintSense::LessEqual,
                                    0.0,
                                )?;
                            }
                        }
                        status.push((s, 1.0));
                    }
                    if status.len() > 1 {
                        b.constraint(format!("one_{}_b{block}", self.id), status, ConstraintSense::LessEqual, 1.0)?;
                    }
                }
            }
        }
        Ok(())
    }
}
