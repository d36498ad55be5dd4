//! Generator for the bundled `mini-helleheide` scenario: a small estate
//! with a cold and a warm circuit, two weeks of hourly synthetic weather,
//! prices and demand.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{TimeZone, Utc};

use super::series::write_series_csv;
use super::ScenarioError;
use crate::thermo::{exergy_weight, Temperature};

pub const MINI_HELLEHEIDE_STEPS: usize = 336;

const SERIES_FILE: &str = "series.csv";
const PRICE_RANGE: (f64, f64) = (34.07, 280.65);
const GRID_EXERGY_RANGE: (f64, f64) = (1.224, 1.704);
/// Relative daily irradiance peak.
const CLEARNESS: [f64; 14] = [0.35, 0.6, 0.2, 0.8, 0.9, 0.5, 0.3, 0.95, 0.85, 0.4, 0.25, 0.7, 0.9, 0.6];
const COLLECTOR_AREA: f64 = 1050.0;
const PV_PEAK: f64 = 150e3;

fn round_to(x: f64, digits: i32) -> f64 {
    let f = 10f64.powi(digits);
    (x * f).round() / f
}

fn rescale(raw: &[f64], (lo, hi): (f64, f64), digits: i32) -> Vec<f64> {
    let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    raw.iter().map(|&x| round_to(lo + (x - min) / (max - min) * (hi - lo), digits)).collect()
}

fn bump(h: f64, centre: f64, width: f64) -> f64 {
    (-((h - centre) / width).powi(2)).exp()
}

/// Irradiance in W/m² on the collector plane.
fn irradiance(t: usize) -> f64 {
    let h = (t % 24) as f64 + 0.5;
    let day = t / 24;
    let sun = ((h - 7.5) / 9.5 * PI).sin().max(0.0);
    if (7.5..17.0).contains(&h) { 650.0 * CLEARNESS[day] * sun } else { 0.0 }
}

/// Collector output in W at outlet temperature `t_out` (°C).
fn collector(g: f64, t_out: f64, t_amb: f64) -> f64 {
    let dt = t_out - t_amb;
    (COLLECTOR_AREA * (0.75 * g - 3.5 * dt - 0.015 * dt * dt)).max(0.0)
}

/// Named columns of the series file, in file order.
pub fn mini_helleheide() -> Vec<(&'static str, Vec<f64>)> {
    let n = MINI_HELLEHEIDE_STEPS;
    let hours: Vec<f64> = (0..n).map(|t| (t % 24) as f64 + 0.5).collect();
    let ambient: Vec<f64> = (0..n)
        .map(|t| {
            let h = hours[t];
            let day = (t / 24) as f64;
            round_to(1.0 + 4.0 * ((h - 9.0) / 24.0 * 2.0 * PI).sin() + 3.0 * (day / 14.0 * 2.0 * PI).sin() + 2.0 * CLEARNESS[t / 24], 2)
        })
        .collect();
    let soil: Vec<f64> = (0..n).map(|t| round_to(5.5 + 0.8 * (t as f64 / n as f64 * 2.0 * PI).sin(), 2)).collect();
    let g: Vec<f64> = (0..n).map(irradiance).collect();
    let pv: Vec<f64> = g.iter().map(|&g| round_to(PV_PEAK * 0.85 * g / 1000.0, 0)).collect();

    let mut solar = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    for t in 0..n {
        let q15 = round_to(collector(g[t], 15.0, ambient[t]), 0);
        let q30 = round_to(collector(g[t], 30.0, ambient[t]), 0).min(q15);
        let q45 = round_to(collector(g[t], 45.0, ambient[t]), 0).min(q30);
        solar[0].push(q15);
        solar[1].push(q30);
        solar[2].push(q45);
    }

    let price_raw: Vec<f64> = (0..n)
        .map(|t| {
            let h = hours[t];
            0.6 * bump(h, 8.0, 2.0) + 0.8 * bump(h, 18.5, 2.5) - 0.3 * bump(h, 3.0, 3.0) - 0.2 * g[t] / 650.0
                + 0.35 * (t as f64 / 168.0 * 2.0 * PI + 1.0).sin()
                + 0.15 * (t as f64 / 53.0 * 2.0 * PI).sin()
        })
        .collect();
    let price = rescale(&price_raw, PRICE_RANGE, 2);
    let exergy_raw: Vec<f64> = (0..n)
        .map(|t| 0.6 * price_raw[t] + 0.2 * (t as f64 / 97.0 * 2.0 * PI).sin() - 0.3 * g[t] / 650.0)
        .collect();
    let grid_exergy = rescale(&exergy_raw, GRID_EXERGY_RANGE, 4);

    let weight = |level_c: f64, t: usize| {
        let level = Temperature::celsius(level_c).expect("valid");
        let amb = Temperature::celsius(ambient[t]).expect("valid");
        round_to(exergy_weight(level, amb), 6)
    };
    let exergy_15: Vec<f64> = (0..n).map(|t| weight(15.0, t)).collect();
    let exergy_30: Vec<f64> = (0..n).map(|t| weight(30.0, t)).collect();
    let exergy_45: Vec<f64> = (0..n).map(|t| weight(45.0, t)).collect();
    let exergy_soil: Vec<f64> = (0..n).map(|t| weight(soil[t], t)).collect();

    let space_heating: Vec<f64> = (0..n)
        .map(|t| {
            let h = hours[t];
            let setback = if (6.0..22.0).contains(&h) { 1.1 } else { 0.8 };
            round_to((4.0e3 * (16.0 - ambient[t]) * setback).max(0.0) + 8.0e3, 0)
        })
        .collect();
    let hot_water: Vec<f64> = hours
        .iter()
        .map(|&h| round_to(12.0e3 + 70.0e3 * bump(h, 7.0, 1.2) + 55.0e3 * bump(h, 19.5, 1.8), 0))
        .collect();
    let electricity: Vec<f64> = hours
        .iter()
        .map(|&h| round_to(28.0e3 + 18.0e3 * bump(h, 7.5, 1.5) + 30.0e3 * bump(h, 19.0, 2.5), 0))
        .collect();

    vec![
        ("ambient", ambient),
        ("soil", soil),
        ("grid_price", price),
        ("grid_exergy", grid_exergy),
        ("pv", pv),
        ("solar_15", solar[0].clone()),
        ("solar_30", solar[1].clone()),
        ("solar_45", solar[2].clone()),
        ("exergy_15", exergy_15),
        ("exergy_30", exergy_30),
        ("exergy_45", exergy_45),
        ("exergy_soil", exergy_soil),
        ("space_heating", space_heating),
        ("hot_water", hot_water),
        ("electricity", electricity),
    ]
}

const DOCUMENT: &str = r#"# Two weeks of a small estate: a cold circuit feeding a heat pump and a
# warm circuit serving space heating and hot water.
schema_version = "1.0.0"
name = "mini-helleheide"
objective = "price"

[time]
start = 2017-02-01T00:00:00Z
step = "1 h"
steps = 336

[[circuits]]
id = "cold"
levels = ["5 degC", "15 degC"]

[[circuits]]
id = "warm"
levels = ["10 degC", "30 degC", "45 degC"]

[[buses]]
id = "el"
carrier = "electricity"

[[buses]]
id = "pv"
carrier = "electricity"

[[buses]]
id = "soil"
carrier = "environment"

[[flows]]
id = "grid_import"
to = "el"
price = { series = "series.csv", column = "grid_price", unit = "EUR/MWh" }
exergy = { series = "series.csv", column = "grid_exergy", unit = "MWh/MWh" }

[[flows]]
id = "pv_generation"
to = "pv"
fixed = { series = "series.csv", column = "pv", unit = "W" }

[[flows]]
id = "pv_self_use"
from = "pv"
to = "el"
price = "67.56 EUR/MWh"
exergy = "1.0 MWh/MWh"

[[flows]]
id = "pv_feed_in"
from = "pv"
price = "-72.90 EUR/MWh"

[[flows]]
id = "electricity_demand"
from = "el"
fixed = { series = "series.csv", column = "electricity", unit = "W" }
is_demand = true

[[flows]]
id = "soil_collector"
to = "soil"
capacity = "100 kW"
exergy = { series = "series.csv", column = "exergy_soil", unit = "1" }

[[components]]
type = "heat_pump"
id = "heat_pump"
electricity_bus = "el"
capacity = "280 kW"
quality = 0.30
sources = [
    { bus = "soil", temperature = { series = "series.csv", column = "soil", unit = "degC" } },
    { bus = "cold_h1", temperature = "15 degC" },
]
sinks = [
    { circuit = "warm", level = 1 },
    { circuit = "warm", level = 2 },
]

[[components]]
type = "constant_efficiency_source"
id = "heating_rod"
circuit = "warm"
input_bus = "el"
efficiency = "95 %"
capacity = "250 kW"

[[components]]
type = "temperature_dependent_source"
id = "solar_thermal"
mode = "shared"
block_steps = 24

[[components.targets]]
circuit = "cold"
level = 1
max = { series = "series.csv", column = "solar_15", unit = "W" }
exergy = { series = "series.csv", column = "exergy_15", unit = "1" }

[[components.targets]]
circuit = "warm"
level = 1
max = { series = "series.csv", column = "solar_30", unit = "W" }
exergy = { series = "series.csv", column = "exergy_30", unit = "1" }

[[components.targets]]
circuit = "warm"
level = 2
max = { series = "series.csv", column = "solar_45", unit = "W" }
exergy = { series = "series.csv", column = "exergy_45", unit = "1" }

[[components]]
type = "demand"
id = "space_heating"
circuit = "warm"
demand = { series = "series.csv", column = "space_heating", unit = "W" }
service_level = 1
return_level = 0
electricity_bus = "el"
draws = [
    { level = 1, pump_fraction = "2 %" },
    { level = 2, pump_fraction = "1 %" },
]

[[components]]
type = "demand"
id = "hot_water"
circuit = "warm"
demand = { series = "series.csv", column = "hot_water", unit = "W" }
service_level = 2
return_level = 0
electricity_bus = "el"
draws = [{ level = 2, pump_fraction = "1 %" }]

[[components]]
type = "layered_storage"
id = "cold_store"
circuit = "cold"
volume = "50 m3"
radius = "1.5 m"
initial_volumes = ["50 m3", "0 m3"]

[[components]]
type = "layered_storage"
id = "warm_store"
circuit = "warm"
volume = "50 m3"
radius = "1.5 m"
initial_volumes = ["50 m3", "0 m3", "0 m3"]
"#;

/// Write `scenario.toml` and its series file into `dir`; returns the
/// document path.
pub fn write_mini_helleheide(dir: &Path) -> Result<PathBuf, ScenarioError> {
    fs::create_dir_all(dir).map_err(|source| ScenarioError::Io { path: dir.to_path_buf(), source })?;
    let start = Utc.with_ymd_and_hms(2017, 2, 1, 0, 0, 0).single().expect("valid date");
    let stamps: Vec<_> = (0..MINI_HELLEHEIDE_STEPS).map(|t| start + chrono::Duration::hours(t as i64)).collect();
    let columns = mini_helleheide();
    let refs: Vec<(&str, &[f64])> = columns.iter().map(|(k, v)| (*k, v.as_slice())).collect();
    write_series_csv(&dir.join(SERIES_FILE), &stamps, &refs)?;
    let path = dir.join("scenario.toml");
    fs::write(&path, DOCUMENT).map_err(|source| ScenarioError::Io { path: path.clone(), source })?;
    Ok(path)
}
