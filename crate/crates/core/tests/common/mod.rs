#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub fn bundled_scenario() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/mini-helleheide/scenario.toml")
}

const HIGHS_SCRIPT: &str = r#"
import sys
try:
    import highspy
except ImportError:
    sys.exit(77)
h = highspy.Highs()
h.setOptionValue("output_flag", False)
h.readModel(sys.argv[1])
h.run()
status = h.modelStatusToString(h.getModelStatus())
print(status)
print(repr(h.getInfo().objective_function_value))
"#;

/// Status word and objective reported by HiGHS for an LP file, or `None`
/// when Python or highspy is not installed.
pub fn highs_solve(lp_file: &Path) -> Option<(String, f64)> {
    let out = Command::new("python3").arg("-c").arg(HIGHS_SCRIPT).arg(lp_file).output().ok()?;
    if !out.status.success() {
        return None;
    }
    let text = String::from_utf8(out.stdout).ok()?;
    let mut lines = text.lines();
    let status = lines.next()?.trim().to_string();
    let objective = lines.next()?.trim().parse().ok()?;
    Some((status, objective))
}

use heatlevels::components::{
    ConstantEfficiencySource, HeatPump, HeatPumpSink, HeatPumpSource, LayeredStorage, StorageRepresentation,
};
use heatlevels::network::{Carrier, FlowSpec, NetworkModel, Profile, TimeGrid};
use heatlevels::thermo::{Medium, TemperatureLadder};

/// One step, two heating rods on electricity priced 1 and 2 per joule,
/// 1 W of demand.
pub fn two_rods() -> NetworkModel {
    let mut net = NetworkModel::new(TimeGrid::hourly(1).unwrap());
    net.add_circuit("w", TemperatureLadder::from_celsius(&[10.0, 50.0]).unwrap(), Medium::water());
    for (id, price) in [("a", 1.0), ("b", 2.0)] {
        let bus = format!("el_{id}");
        net.add_bus(&bus, Carrier::Electricity);
        net.add_flow(FlowSpec::new(format!("grid_{id}"), None, Some(&bus)).with_capacity(2.0).with_price(price));
        net.add_component(ConstantEfficiencySource {
            id: format!("rod_{id}"),
            circuit: "w".into(),
            input_bus: bus,
            efficiency: 1.0,
            capacity: 2.0.into(),
        });
    }
    net.add_flow(FlowSpec::new("load", Some("w_h1"), None).with_fixed(1.0).as_demand());
    net
}

/// Two steps: heat is cheap first and ten times dearer next; a small tank
/// can carry it over.
pub fn storage_arbitrage() -> NetworkModel {
    let mut net = NetworkModel::new(TimeGrid::hourly(2).unwrap());
    net.add_circuit("w", TemperatureLadder::from_celsius(&[10.0, 50.0]).unwrap(), Medium::water());
    let price = Profile::series(vec![1e-8, 1e-7], "EUR/J");
    net.add_flow(FlowSpec::new("heat_buy", None, Some("w_h1")).with_capacity(60e3).with_price(price));
    net.add_flow(FlowSpec::new("load", Some("w_h1"), None).with_fixed(20e3).as_demand());
    let mut tank = LayeredStorage::new("tank", "w", 2.0, 0.6, vec![2.0, 0.0]);
    tank.max_charge = Some(Profile::series(vec![60e3, 0.0], "W"));
    tank.max_discharge = Some(Profile::series(vec![0.0, 60e3], "W"));
    net.add_component(tank);
    net
}

/// Three steps of a heat pump on a capped soil source, backed by a heating
/// rod, serving a fixed load at the top of a three-level circuit.
pub fn heat_pump_backup() -> NetworkModel {
    let mut net = NetworkModel::new(TimeGrid::hourly(3).unwrap());
    net.add_circuit("w", TemperatureLadder::from_celsius(&[10.0, 30.0, 45.0]).unwrap(), Medium::water());
    net.add_bus("el", Carrier::Electricity).add_bus("soil", Carrier::Environment);
    let price = Profile::series(vec![2e-8, 5e-8, 3e-8], "EUR/J");
    net.add_flow(FlowSpec::new("grid", None, Some("el")).with_price(price));
    net.add_flow(FlowSpec::new("soil_heat", None, Some("soil")).with_capacity(Profile::series(vec![3e3, 1e3, 2e3], "W")));
    net.add_component(HeatPump {
        id: "hp".into(),
        electricity_bus: "el".into(),
        sources: vec![HeatPumpSource { bus: "soil".into(), temperature: Profile::series(vec![279.0, 281.0, 283.0], "K") }],
        sinks: vec![HeatPumpSink { circuit: "w".into(), level: 2 }],
        capacity: 6e3.into(),
        quality: 0.3,
    });
    net.add_component(ConstantEfficiencySource {
        id: "rod".into(),
        circuit: "w".into(),
        input_bus: "el".into(),
        efficiency: 0.95,
        capacity: 6e3.into(),
    });
    net.add_flow(FlowSpec::new("load", Some("w_h2"), None).with_fixed(4e3).as_demand());
    net
}

pub fn micro_scenarios() -> Vec<(&'static str, NetworkModel)> {
    vec![("two_rods", two_rods()), ("storage_arbitrage", storage_arbitrage()), ("heat_pump_backup", heat_pump_backup())]
}

/// Tank with charging and discharging disabled, levels 20 K apart.
pub fn idle_tank(initial: Vec<f64>, steps: usize) -> NetworkModel {
    let k = initial.len();
    let levels: Vec<f64> = (0..k).map(|n| 10.0 + 20.0 * n as f64).collect();
    let mut net = NetworkModel::new(TimeGrid::hourly(steps).unwrap());
    net.add_circuit("w", TemperatureLadder::from_celsius(&levels).unwrap(), Medium::water());
    let mut tank = LayeredStorage::new("tank", "w", initial.iter().sum(), 1.5, initial);
    tank.max_charge = Some(0.0.into());
    tank.max_discharge = Some(0.0.into());
    net.add_component(tank);
    net
}

/// Cheap heat in the first half, expensive in the second, a tank to shift
/// it and a fixed top-level load.
pub fn tank_arbitrage(representation: StorageRepresentation, k: usize) -> NetworkModel {
    let steps = 6;
    let levels: Vec<f64> = (0..k).map(|n| 10.0 + 35.0 * n as f64 / (k - 1) as f64).collect();
    let mut net = NetworkModel::new(TimeGrid::hourly(steps).unwrap());
    net.add_circuit("w", TemperatureLadder::from_celsius(&levels).unwrap(), Medium::water());
    let top = k - 1;
    let prices: Vec<f64> = (0..steps).map(|t| if t < 3 { 1e-8 } else { 5e-8 }).collect();
    net.add_flow(
        FlowSpec::new("boiler", None, Some(&format!("w_h{top}")))
            .with_capacity(80e3)
            .with_price(Profile::series(prices, "EUR/J")),
    );
    net.add_flow(FlowSpec::new("load", Some(&format!("w_h{top}")), None).with_fixed(30e3).as_demand());
    if k > 2 {
        net.add_flow(FlowSpec::new("low_load", Some("w_h1"), None).with_fixed(5e3));
    }
    let mut initial = vec![0.0; k];
    initial[0] = 4.0;
    let mut tank = LayeredStorage::new("tank", "w", 4.0, 0.8, initial);
    tank.representation = representation;
    net.add_component(tank);
    net
}
