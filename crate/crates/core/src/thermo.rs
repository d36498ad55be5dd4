//! Units, media, temperature ladders and the closed-form thermodynamic
//! relations used by the constraint emitters.
//!
//! All temperatures are absolute (kelvin). Configuration code converts
//! Celsius inputs before they reach this module.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Offset between the Celsius and Kelvin scales.
pub const CELSIUS_OFFSET: f64 = 273.15;

/// Absolute tolerance for temperature comparisons in constraint builders.
pub const COMPARISON_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error("temperature must be positive and finite, got {0} K")]
    NonPositiveTemperature(f64),
    #[error("negative volume {0} m³")]
    NegativeVolume(f64),
    #[error("temperature inversion: high {high} K is below low {low} K")]
    Inversion { high: f64, low: f64 },
    #[error("no temperature lift: sink {sink} K must exceed source {from} K")]
    NoLift { from: f64, sink: f64 },
    #[error("mixing ratio undefined for T_n={upper} K, T_m={middle} K, T_low={low} K")]
    MixingOrder { upper: f64, middle: f64, low: f64 },
    #[error("quality fraction must lie in (0, 1], got {0}")]
    Quality(f64),
    #[error("invalid medium: density {density}, heat capacity {heat_capacity}")]
    Medium { density: f64, heat_capacity: f64 },
    #[error("invalid pipe geometry: diameter {diameter} m, velocity {velocity} m/s")]
    Pipe { diameter: f64, velocity: f64 },
    #[error("temperature ladder needs at least 2 levels, got {0}")]
    LadderTooShort(usize),
    #[error("temperature ladder is not strictly increasing at level {index} ({value} K)")]
    LadderOrder { index: usize, value: f64 },
}

/// Absolute temperature in kelvin.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Temperature(f64);

impl Temperature {
    pub fn kelvin(value: f64) -> Result<Self, ThermoError> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(ThermoError::NonPositiveTemperature(value))
        }
    }

    pub fn celsius(value: f64) -> Result<Self, ThermoError> {
        Self::kelvin(value + CELSIUS_OFFSET)
    }

    pub fn as_kelvin(self) -> f64 {
        self.0
    }

    pub fn as_celsius(self) -> f64 {
        self.0 - CELSIUS_OFFSET
    }
}

impl TryFrom<f64> for Temperature {
    type Error = ThermoError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::kelvin(value)
    }
}

impl From<Temperature> for f64 {
    fn from(t: Temperature) -> f64 {
        t.0
    }
}

impl fmt::Display for Temperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} K", self.0)
    }
}

/// Heat transfer medium with constant properties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    /// kg/m³
    density: f64,
    /// J/(kg·K)
    heat_capacity: f64,
}

impl Medium {
    pub fn new(density: f64, heat_capacity: f64) -> Result<Self, ThermoError> {
        if density.is_finite() && density > 0.0 && heat_capacity.is_finite() && heat_capacity > 0.0 {
            Ok(Self { density, heat_capacity })
        } else {
            Err(ThermoError::Medium { density, heat_capacity })
        }
    }

    /// Liquid water, 1000 kg/m³ and 4186 J/(kg·K).
    pub fn water() -> Self {
        Self { density: 1000.0, heat_capacity: 4186.0 }
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn heat_capacity(&self) -> f64 {
        self.heat_capacity
    }

    /// Volumetric heat capacity ρ·c_p in J/(m³·K).
    pub fn volumetric_heat_capacity(&self) -> f64 {
        self.density * self.heat_capacity
    }
}

impl Default for Medium {
    fn default() -> Self {
        Self::water()
    }
}

/// Ordered set of discrete temperature levels. Level 0 is the reference
/// (lowest) temperature; every heat quantity is measured against it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Temperature>", into = "Vec<Temperature>")]
pub struct TemperatureLadder {
    levels: Vec<Temperature>,
}

impl TemperatureLadder {
    pub fn new(levels: Vec<Temperature>) -> Result<Self, ThermoError> {
        if levels.len() < 2 {
            return Err(ThermoError::LadderTooShort(levels.len()));
        }
        for (index, pair) in levels.windows(2).enumerate() {
            if pair[1].as_kelvin() <= pair[0].as_kelvin() {
                return Err(ThermoError::LadderOrder { index: index + 1, value: pair[1].as_kelvin() });
            }
        }
        Ok(Self { levels })
    }

    pub fn from_kelvin(values: &[f64]) -> Result<Self, ThermoError> {
        let levels = values.iter().map(|&v| Temperature::kelvin(v)).collect::<Result<Vec<_>, _>>()?;
        Self::new(levels)
    }

    pub fn from_celsius(values: &[f64]) -> Result<Self, ThermoError> {
        let levels = values.iter().map(|&v| Temperature::celsius(v)).collect::<Result<Vec<_>, _>>()?;
        Self::new(levels)
    }

    /// Number of levels `k`, including the reference level.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, n: usize) -> Temperature {
        self.levels[n]
    }

    pub fn levels(&self) -> &[Temperature] {
        &self.levels
    }

    pub fn reference(&self) -> Temperature {
        self.levels[0]
    }

    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    /// Ratio `r_{n,m}` for lifting from level `m` to level `n`.
    pub fn ratio(&self, n: usize, m: usize) -> Result<f64, ThermoError> {
        mixing_ratio(self.levels[n], self.levels[m], self.reference())
    }
}

impl TryFrom<Vec<Temperature>> for TemperatureLadder {
    type Error = ThermoError;

    fn try_from(levels: Vec<Temperature>) -> Result<Self, Self::Error> {
        Self::new(levels)
    }
}

impl From<TemperatureLadder> for Vec<Temperature> {
    fn from(ladder: TemperatureLadder) -> Self {
        ladder.levels
    }
}

/// Circular pipe carrying the medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipeGeometry {
    diameter: f64,
    velocity: f64,
}

impl PipeGeometry {
    pub fn new(diameter: f64, velocity: f64) -> Result<Self, ThermoError> {
        if diameter.is_finite() && diameter > 0.0 && velocity.is_finite() && velocity >= 0.0 {
            Ok(Self { diameter, velocity })
        } else {
            Err(ThermoError::Pipe { diameter, velocity })
        }
    }

    pub fn cross_section(&self) -> f64 {
        PI * (self.diameter / 2.0).powi(2)
    }

    /// Volumetric flow in m³/s.
    pub fn volume_flow(&self) -> f64 {
        self.cross_section() * self.velocity
    }
}

fn check_order(high: Temperature, low: Temperature) -> Result<(), ThermoError> {
    if high.as_kelvin() < low.as_kelvin() {
        Err(ThermoError::Inversion { high: high.as_kelvin(), low: low.as_kelvin() })
    } else {
        Ok(())
    }
}

/// Thermal energy ρ·c_p·T·V of a volume, in J. `temperature_span` is in
/// kelvin and may be zero (the absolute-zero limit).
pub fn thermal_energy(temperature_span: f64, volume: f64, medium: &Medium) -> Result<f64, ThermoError> {
    if volume < 0.0 || volume.is_nan() {
        return Err(ThermoError::NegativeVolume(volume));
    }
    if temperature_span < 0.0 || temperature_span.is_nan() {
        return Err(ThermoError::NonPositiveTemperature(temperature_span));
    }
    Ok(medium.volumetric_heat_capacity() * temperature_span * volume)
}

/// Heat held by `volume` at `high` relative to `low`, in J.
pub fn heat_content(high: Temperature, low: Temperature, volume: f64, medium: &Medium) -> Result<f64, ThermoError> {
    check_order(high, low)?;
    thermal_energy(high.as_kelvin() - low.as_kelvin(), volume, medium)
}

/// Heat rate carried through a pipe, in W.
///
/// Uses the volumetric flow π(d/2)²·v rather than a bare d·v product so the
/// result has units of power.
pub fn heat_rate_from_flow(
    pipe: &PipeGeometry,
    high: Temperature,
    low: Temperature,
    medium: &Medium,
) -> Result<f64, ThermoError> {
    check_order(high, low)?;
    Ok(medium.volumetric_heat_capacity() * pipe.volume_flow() * (high.as_kelvin() - low.as_kelvin()))
}

/// Share of heat at `upper` that must be newly supplied when the medium is
/// taken from `middle` (or, read the other way, the share that serves a
/// demand when the medium returns at `middle`).
pub fn mixing_ratio(upper: Temperature, middle: Temperature, low: Temperature) -> Result<f64, ThermoError> {
    let (n, m, l) = (upper.as_kelvin(), middle.as_kelvin(), low.as_kelvin());
    if m >= n || m < l {
        return Err(ThermoError::MixingOrder { upper: n, middle: m, low: l });
    }
    Ok((n - m) / (n - l))
}

/// Carnot efficiency 1 − T_low/T_high.
pub fn carnot_efficiency(low: Temperature, high: Temperature) -> Result<f64, ThermoError> {
    check_order(high, low)?;
    Ok(1.0 - low.as_kelvin() / high.as_kelvin())
}

/// Heat pump coefficient of performance as a fixed fraction of the Carnot COP.
pub fn heat_pump_cop(source: Temperature, sink: Temperature, quality: f64) -> Result<f64, ThermoError> {
    if !(quality > 0.0 && quality <= 1.0) {
        return Err(ThermoError::Quality(quality));
    }
    if sink.as_kelvin() <= source.as_kelvin() {
        return Err(ThermoError::NoLift { from: source.as_kelvin(), sink: sink.as_kelvin() });
    }
    Ok(quality * sink.as_kelvin() / (sink.as_kelvin() - source.as_kelvin()))
}

/// Exergy weight of heat at `level` against ambient `ambient`; symmetric,
/// zero when the temperatures coincide.
pub fn exergy_weight(level: Temperature, ambient: Temperature) -> f64 {
    let (a, b) = (level.as_kelvin(), ambient.as_kelvin());
    1.0 - a.min(b) / a.max(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(v: f64) -> Temperature {
        Temperature::kelvin(v).unwrap()
    }

    #[test]
    fn thermal_energy_hand_values() {
        let water = Medium::water();
        assert_eq!(thermal_energy(0.0, 1.0, &water).unwrap(), 0.0);
        assert_eq!(thermal_energy(300.0, 0.0, &water).unwrap(), 0.0);
        let e = thermal_energy(300.0, 1.0, &water).unwrap();
        assert!((e - 1.2558e9).abs() / 1.2558e9 < 1e-12);
        assert!(matches!(thermal_energy(300.0, -1.0, &water), Err(ThermoError::NegativeVolume(_))));
    }

    #[test]
    fn heat_content_is_additive_over_ladder_intervals() {
        let water = Medium::water();
        let (t10, t30, t45) = (k(283.15), k(303.15), k(318.15));
        let whole = heat_content(t45, t10, 1.0, &water).unwrap();
        let parts = heat_content(t45, t30, 1.0, &water).unwrap() + heat_content(t30, t10, 1.0, &water).unwrap();
        assert!((whole - parts).abs() <= 1e-12 * whole);
        assert_eq!(heat_content(t30, t30, 3.0, &water).unwrap(), 0.0);
        assert!(matches!(heat_content(t10, t45, 1.0, &water), Err(ThermoError::Inversion { .. })));
    }

    #[test]
    fn pipe_heat_rate() {
        let water = Medium::water();
        let pipe = PipeGeometry::new(0.1, 1.0).unwrap();
        let q = heat_rate_from_flow(&pipe, k(323.15), k(303.15), &water).unwrap();
        let expected = 1000.0 * 4186.0 * PI * 0.0025 * 20.0;
        assert!((q - expected).abs() / expected < 1e-12);
        assert!((q - 6.575e5).abs() / 6.575e5 < 1e-3);
        let still = PipeGeometry::new(0.1, 0.0).unwrap();
        assert_eq!(heat_rate_from_flow(&still, k(323.15), k(303.15), &water).unwrap(), 0.0);
        let fast = PipeGeometry::new(0.1, 2.0).unwrap();
        let q2 = heat_rate_from_flow(&fast, k(323.15), k(303.15), &water).unwrap();
        assert!((q2 - 2.0 * q).abs() < 1e-6);
    }

    #[test]
    fn mixing_ratio_edges() {
        let low = k(283.15);
        assert_eq!(mixing_ratio(k(318.15), low, low).unwrap(), 1.0);
        assert!(mixing_ratio(k(318.15), k(318.15), low).is_err());
        assert!(mixing_ratio(k(318.15), k(280.0), low).is_err());
        let r = mixing_ratio(k(318.15), k(318.15 - 1e-9), low).unwrap();
        assert!(r < 1e-9);
    }

    #[test]
    fn ladder_rejects_bad_orders() {
        assert!(TemperatureLadder::from_celsius(&[10.0]).is_err());
        assert!(matches!(
            TemperatureLadder::from_celsius(&[10.0, 30.0, 30.0]),
            Err(ThermoError::LadderOrder { index: 2, .. })
        ));
        assert!(TemperatureLadder::from_celsius(&[10.0, 45.0, 30.0]).is_err());
        let ladder = TemperatureLadder::from_celsius(&[10.0, 30.0, 45.0]).unwrap();
        assert_eq!(ladder.len(), 3);
        assert!((ladder.ratio(2, 1).unwrap() - 15.0 / 35.0).abs() < 1e-12);
    }

    #[test]
    fn cop_errors() {
        assert!(matches!(heat_pump_cop(k(300.0), k(300.0), 0.3), Err(ThermoError::NoLift { .. })));
        assert!(matches!(heat_pump_cop(k(280.0), k(300.0), 0.0), Err(ThermoError::Quality(_))));
        assert!(matches!(heat_pump_cop(k(280.0), k(300.0), 1.5), Err(ThermoError::Quality(_))));
        let near_zero = heat_pump_cop(k(1e-9), k(300.0), 1.0).unwrap();
        assert!((near_zero - 1.0).abs() < 1e-9);
    }

    #[test]
    fn temperature_rejects_nonpositive() {
        assert!(Temperature::kelvin(0.0).is_err());
        assert!(Temperature::kelvin(-1.0).is_err());
        assert!(Temperature::kelvin(f64::NAN).is_err());
        assert!((Temperature::celsius(15.0).unwrap().as_kelvin() - 288.15).abs() < 1e-12);
    }
}
