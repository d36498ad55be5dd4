use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::component_error;
use crate::lp::{ConstraintSense, VariableId};
use crate::network::{
    check_nonnegative, heat_bus_id, Expression, FlowKind, FlowRecord, ModelBuilder, NetworkError, NetworkModel,
    Profile, SplitGeometry, StorageRecord,
};
use crate::thermo::Medium;

/// Tolerance on the initial volumes summing to the tank volume, in m³.
const VOLUME_TOLERANCE: f64 = 1e-9;

/// Time constant of the moving boundary of a middle layer, in s.
///
/// Losses through the lateral surface `2πrh` shrink the layer height as
/// `dh/dt = −h/τ` with `τ = ρ·c_p·r·d_iso / (2λ)`.
pub fn time_constant(medium: &Medium, radius: f64, conductivity: f64, insulation: f64) -> f64 {
    medium.volumetric_heat_capacity() * radius * insulation / (2.0 * conductivity)
}

/// Share of a layer lost per step of length `dt` for time constant `tau`.
pub fn relative_loss(dt: f64, tau: f64) -> f64 {
    -(-dt / tau).exp_m1()
}

/// Height of the top layer after `t` seconds without charging, from the
/// exact solution of `dh/dt = −(h + r/2)/τ` (lid losses included).
pub fn top_layer_height(h0: f64, radius: f64, tau: f64, t: f64) -> f64 {
    (h0 + radius / 2.0) * (-t / tau).exp() - radius / 2.0
}

/// Heat value change of a layer when the reference temperature moves by
/// `delta_t` kelvin, in J. Rising ambient lowers the stored heat.
pub fn ambient_adjustment(delta_t: f64, volume: f64, medium: &Medium) -> f64 {
    -delta_t * medium.volumetric_heat_capacity() * volume
}

/// Outer surface of a closed cylinder of the given volume, in m².
pub fn cylinder_surface(radius: f64, volume: f64) -> f64 {
    let height = volume / (PI * radius * radius);
    2.0 * PI * radius * height + 2.0 * PI * radius * radius
}

/// Surfaces of stacked layers (reference layer first): lateral area for
/// all, plus the bottom for the reference layer and the lid for the top
/// layer.
pub fn layer_surfaces(radius: f64, volumes: &[f64]) -> Vec<f64> {
    let k = volumes.len();
    let disc = PI * radius * radius;
    volumes
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let lateral = 2.0 * PI * radius * v / disc;
            if n == 0 || n + 1 == k {
                lateral + disc
            } else {
                lateral
            }
        })
        .collect()
}

/// Surface counted for the reference layers when each hot layer lives in a
/// tank of its own with the full volume: tank `n` contributes everything
/// except the share of layer `n`.
pub fn split_surface_overestimate(radius: f64, total_volume: f64, volumes: &[f64]) -> f64 {
    let a = cylinder_surface(radius, total_volume);
    layer_surfaces(radius, volumes).iter().skip(1).map(|a_n| a - a_n).sum()
}

/// `(k − 2)·A + A_0` for `k` layers.
pub fn surface_overestimate_closed_form(radius: f64, total_volume: f64, volumes: &[f64]) -> f64 {
    let k = volumes.len() as f64;
    (k - 2.0) * cylinder_surface(radius, total_volume) + layer_surfaces(radius, volumes)[0]
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StorageRepresentation {
    /// One tank, layers stacked, volumes summing to the tank volume.
    #[default]
    SingleTank,
    /// One two-layer tank per hot level, coupled by a shared volume limit.
    SplitTanks,
}

/// Stratified tank with one layer per ladder level and moving boundaries.
///
/// Layer `n > 0` holds `V_n` m³ at `T_n`; heat is counted against the
/// circuit reference `T_0`, so losses move volume from a hot layer to the
/// reference layer instead of cooling it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayeredStorage {
    pub id: String,
    pub circuit: String,
    /// Tank volume V in m³.
    pub volume: f64,
    pub radius: f64,
    /// Insulation conductivity λ in W/(m·K).
    #[serde(default = "default_conductivity")]
    pub insulation_conductivity: f64,
    /// Insulation thickness in m.
    #[serde(default = "default_thickness")]
    pub insulation_thickness: f64,
    #[serde(default)]
    pub representation: StorageRepresentation,
    /// Initial volume per layer (reference layer first), summing to V.
    pub initial_volumes: Vec<f64>,
    /// Charge limit per hot layer in W.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_charge: Option<Profile>,
    /// Discharge limit per hot layer in W.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_discharge: Option<Profile>,
    /// Fill height at which lid losses are linearised; defaults to one
    /// layer's equal share of the tank.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal_fill_height: Option<f64>,
    /// Ambient temperature (K) for the virtual heat flows of a moving
    /// reference; `None` keeps the reference constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<Profile>,
    /// Require every hot layer to end at least as full as it started.
    #[serde(default)]
    pub keep_final_volumes: bool,
}

fn default_conductivity() -> f64 {
    0.04
}

fn default_thickness() -> f64 {
    0.1
}

impl LayeredStorage {
    pub fn new(id: &str, circuit: &str, volume: f64, radius: f64, initial_volumes: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            circuit: circuit.into(),
            volume,
            radius,
            insulation_conductivity: default_conductivity(),
            insulation_thickness: default_thickness(),
            representation: StorageRepresentation::SingleTank,
            initial_volumes,
            max_charge: None,
            max_discharge: None,
            nominal_fill_height: None,
            ambient: None,
            keep_final_volumes: false,
        }
    }

    fn medium<'n>(&self, net: &'n NetworkModel) -> Result<&'n Medium, NetworkError> {
        Ok(&net.require_circuit(&self.id, &self.circuit)?.medium)
    }

    /// Nominal fill height of one layer in m.
    pub fn nominal_height(&self, levels: usize) -> f64 {
        self.nominal_fill_height
            .unwrap_or(self.volume / levels as f64 / (PI * self.radius * self.radius))
    }

    /// Relative loss per step for each layer (reference layer first). The
    /// reference layer loses nothing; the top layer adds lid losses,
    /// linearised at the nominal fill height.
    pub fn losses(&self, medium: &Medium, levels: usize, dt: f64) -> Vec<f64> {
        let tau = time_constant(medium, self.radius, self.insulation_conductivity, self.insulation_thickness);
        let tau_top = tau / (1.0 + self.radius / (2.0 * self.nominal_height(levels)));
        (0..levels)
            .map(|n| match n {
                0 => 0.0,
                n if n + 1 == levels => relative_loss(dt, tau_top),
                _ => relative_loss(dt, tau),
            })
            .collect()
    }

    pub(crate) fn validate(&self, net: &NetworkModel) -> Result<(), NetworkError> {
        let c = net.require_circuit(&self.id, &self.circuit)?;
        let k = c.ladder.len();
        for (name, v) in [
            ("volume", self.volume),
            ("radius", self.radius),
            ("insulation conductivity", self.insulation_conductivity),
            ("insulation thickness", self.insulation_thickness),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(component_error(&self.id, format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(h) = self.nominal_fill_height {
            if !(h > 0.0 && h.is_finite()) {
                return Err(component_error(&self.id, format!("nominal fill height must be positive, got {h}")));
            }
        }
        if self.initial_volumes.len() != k {
            return Err(component_error(
                &self.id,
                format!("expected {k} initial volumes, got {}", self.initial_volumes.len()),
            ));
        }
        if self.initial_volumes.iter().any(|v| !(*v >= 0.0)) {
            return Err(component_error(&self.id, "initial volumes must be non-negative"));
        }
        let sum: f64 = self.initial_volumes.iter().sum();
        if (sum - self.volume).abs() > VOLUME_TOLERANCE {
            return Err(component_error(
                &self.id,
                format!("initial volumes sum to {sum} m³, tank holds {} m³", self.volume),
            ));
        }
        for (name, p) in [("max charge", &self.max_charge), ("max discharge", &self.max_discharge)] {
            if let Some(p) = p {
                check_nonnegative(p, &net.grid, &format!("{} {name}", self.id))?;
            }
        }
        for (n, beta) in self.losses(&c.medium, k, net.grid.dt()).iter().enumerate() {
            if !(0.0..1.0).contains(beta) {
                return Err(component_error(&self.id, format!("loss {beta} of layer {n} outside [0, 1)")));
            }
        }
        if let Some(ambient) = &self.ambient {
            ambient.validate(&net.grid, &format!("{} ambient", self.id))?;
            let reference = self.reference_temperatures(ambient, net.grid.steps());
            for (t, tr) in reference.iter().enumerate() {
                if c.ladder.level(1).as_kelvin() <= *tr {
                    return Err(component_error(
                        &self.id,
                        format!("ambient {tr} K at boundary step {t} reaches the first hot level"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Reference temperature at boundary steps `0..=N`; the last step
    /// repeats the final forward difference.
    fn reference_temperatures(&self, ambient: &Profile, steps: usize) -> Vec<f64> {
        let mut t: Vec<f64> = (0..steps).map(|i| ambient.at(i)).collect();
        let last = t[steps - 1];
        let slope = if steps >= 2 { last - t[steps - 2] } else { 0.0 };
        t.push(last + slope);
        t
    }

    pub(crate) fn emit(&self, b: &mut ModelBuilder<'_>) -> Result<(), NetworkError> {
        let circuit = b.net.require_circuit(&self.id, &self.circuit)?;
        let ladder = circuit.ladder.clone();
        let medium = *self.medium(b.net)?;
        let k = ladder.len();
        let steps = b.steps();
        let dt = b.dt();
        let rho_c = medium.volumetric_heat_capacity();
        let beta = self.losses(&medium, k, dt);
        let reference: Vec<f64> = match &self.ambient {
            Some(a) => self.reference_temperatures(a, steps),
            None => vec![ladder.reference().as_kelvin(); steps + 1],
        };

        // Volumes per layer and boundary step; the reference layer is a
        // variable in a single tank and implied in split tanks.
        let mut volumes: Vec<Vec<Expression>> = vec![Vec::with_capacity(steps + 1); k];
        let mut hot: Vec<Vec<VariableId>> = vec![Vec::with_capacity(steps + 1); k];
        for n in 1..k {
            for t in 0..=steps {
                let (lo, hi) = if t == 0 {
                    (self.initial_volumes[n], self.initial_volumes[n])
                } else {
                    (0.0, self.volume)
                };
                let v = b.variable(format!("vol_{}_l{n}_t{t}", self.id), lo, hi)?;
                hot[n].push(v);
                volumes[n].push(Expression::var(v));
            }
        }
        for t in 0..=steps {
            let sum_terms: Vec<_> = (1..k).map(|n| (hot[n][t], 1.0)).collect();
            match self.representation {
                StorageRepresentation::SingleTank => {
                    let (lo, hi) = if t == 0 {
                        (self.initial_volumes[0], self.initial_volumes[0])
                    } else {
                        (0.0, self.volume)
                    };
                    let v0 = b.variable(format!("vol_{}_l0_t{t}", self.id), lo, hi)?;
                    volumes[0].push(Expression::var(v0));
                    if t > 0 {
                        let mut terms = sum_terms;
                        terms.push((v0, 1.0));
                        b.constraint(format!("tot_{}_t{t}", self.id), terms, ConstraintSense::Equal, self.volume)?;
                    }
                }
                StorageRepresentation::SplitTanks => {
                    volumes[0].push(Expression {
                        terms: sum_terms.iter().map(|&(v, _)| (v, -1.0)).collect(),
                        constant: self.volume,
                    });
                    if t > 0 {
                        b.constraint(format!("tot_{}_t{t}", self.id), sum_terms, ConstraintSense::LessEqual, self.volume)?;
                    }
                }
            }
        }

        for n in 1..k {
            let bus = b.bus(&self.id, &heat_bus_id(&self.circuit, n))?;
            let t_n = ladder.level(n).as_kelvin();
            let mut charge = Vec::with_capacity(steps);
            let mut discharge = Vec::with_capacity(steps);
            for t in 0..steps {
                let ch_hi = self.max_charge.as_ref().map_or(f64::INFINITY, |p| p.at(t));
                let dis_hi = self.max_discharge.as_ref().map_or(f64::INFINITY, |p| p.at(t));
                let ch = b.variable(format!("chg_{}_l{n}_t{t}", self.id), 0.0, ch_hi)?;
                let dis = b.variable(format!("dis_{}_l{n}_t{t}", self.id), 0.0, dis_hi)?;
                b.tap(bus, t, ch, -1.0);
                b.tap(bus, t, dis, 1.0);
                charge.push(ch);
                discharge.push(dis);
                // e(t+1)·V(t+1) = ((1 − β)·e(t) − ΔT·ρc)·V(t) + Δt·(charge − discharge)
                let e_now = rho_c * (t_n - reference[t]);
                let e_next = rho_c * (t_n - reference[t + 1]);
                let delta = reference[t + 1] - reference[t];
                let keep = if self.ambient.is_some() {
                    ((1.0 - beta[n]) * e_now - delta * rho_c) / e_next
                } else {
                    1.0 - beta[n]
                };
                let gain = dt / e_next;
                b.constraint(
                    format!("dyn_{}_l{n}_t{t}", self.id),
                    vec![(hot[n][t + 1], 1.0), (hot[n][t], -keep), (ch, -gain), (dis, gain)],
                    ConstraintSense::Equal,
                    0.0,
                )?;
            }
            if self.keep_final_volumes {
                b.constraint(
                    format!("fin_{}_l{n}", self.id),
                    vec![(hot[n][steps], 1.0)],
                    ConstraintSense::GreaterEqual,
                    self.initial_volumes[n],
                )?;
            }
            b.record_plain(format!("{}_charge_l{n}", self.id), FlowKind::Transfer, &charge);
            b.record_plain(format!("{}_discharge_l{n}", self.id), FlowKind::Transfer, &discharge);
            if self.ambient.is_some() {
                b.record_flow(FlowRecord {
                    id: format!("{}_ambient_l{n}", self.id),
                    kind: FlowKind::Transfer,
                    series: (0..steps)
                        .map(|t| {
                            let q = ambient_adjustment(reference[t + 1] - reference[t], 1.0, &medium) / dt;
                            Expression::scaled(hot[n][t], q)
                        })
                        .collect(),
                    price: vec![0.0; steps],
                    exergy: vec![0.0; steps],
                });
            }
        }
        let split = match self.representation {
            StorageRepresentation::SplitTanks => Some(SplitGeometry { radius: self.radius, total_volume: self.volume }),
            StorageRepresentation::SingleTank => None,
        };
        b.record_storage(StorageRecord { id: self.id.clone(), volumes, total_volume: self.volume, split_overestimate: split });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loss_from_insulation() {
        let tau = time_constant(&Medium::water(), 1.0, 0.04, 0.1);
        assert!((tau - 5.2325e6).abs() < 1e-3);
        let beta = relative_loss(3600.0, tau);
        assert!((beta - (1.0 - (-3600.0 / tau).exp())).abs() < 1e-15);
    }

    #[test]
    fn ambient_rise_lowers_heat() {
        assert_eq!(ambient_adjustment(1.0, 1.0, &Medium::water()), -4.186e6);
        assert_eq!(ambient_adjustment(0.0, 3.0, &Medium::water()), 0.0);
    }

    #[test]
    fn layer_surfaces_add_up() {
        let v = [10.0, 20.0, 20.0];
        let total: f64 = layer_surfaces(1.5, &v).iter().sum();
        let a = cylinder_surface(1.5, 50.0);
        assert!((total - a).abs() < 1e-12 * a);
    }
}
