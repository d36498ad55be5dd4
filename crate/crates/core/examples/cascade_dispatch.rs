//! A three-level warm circuit built in code: a heat pump on soil heat, a
//! heating rod as backup and a hot water demand, over one day with a
//! two-tier tariff.

use heatlevels::components::{ConstantEfficiencySource, Demand, HeatPump, HeatPumpSink, HeatPumpSource};
use heatlevels::lp::SolverTolerances;
use heatlevels::network::{solve_network, Carrier, FlowSpec, NetworkModel, ObjectiveKind, Profile, TimeGrid};
use heatlevels::thermo::{Medium, TemperatureLadder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let steps = 24;
    let mut net = NetworkModel::new(TimeGrid::hourly(steps)?);
    net.add_circuit("warm", TemperatureLadder::from_celsius(&[10.0, 30.0, 45.0])?, Medium::water());
    net.add_bus("el", Carrier::Electricity).add_bus("soil", Carrier::Environment);

    let tariff: Vec<f64> = (0..steps).map(|t| if (7..21).contains(&t) { 0.30 } else { 0.12 } / 3.6e6).collect();
    net.add_flow(FlowSpec::new("grid", None, Some("el")).with_price(Profile::series(tariff, "EUR/J")));
    net.add_flow(FlowSpec::new("soil_heat", None, Some("soil")).with_capacity(8e3));
    net.add_component(HeatPump {
        id: "hp".into(),
        electricity_bus: "el".into(),
        sources: vec![HeatPumpSource { bus: "soil".into(), temperature: 280.0.into() }],
        sinks: vec![HeatPumpSink { circuit: "warm".into(), level: 1 }, HeatPumpSink { circuit: "warm".into(), level: 2 }],
        capacity: 12e3.into(),
        quality: 0.3,
    });
    net.add_component(ConstantEfficiencySource {
        id: "rod".into(),
        circuit: "warm".into(),
        input_bus: "el".into(),
        efficiency: 0.95,
        capacity: 20e3.into(),
    });
    net.add_component(Demand {
        id: "dhw".into(),
        circuit: "warm".into(),
        demand: 6e3.into(),
        service_level: 2,
        return_level: 0,
        draws: Vec::new(),
        electricity_bus: None,
    });

    let (_, solution) = solve_network(&net, ObjectiveKind::Price, &SolverTolerances::default())?;
    println!("cost {:.3} EUR", solution.objective);
    for id in ["grid", "hp_heat_soil_warm_l1", "hp_heat_soil_warm_l2", "rod_heat", "warm_lift_l2"] {
        println!("{id:>22}: {:8.1} kWh", solution.energy(id).unwrap_or(0.0) / 3.6e6);
    }
    Ok(())
}
