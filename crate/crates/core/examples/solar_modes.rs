//! A solar collector serving two levels, run with shared and with
//! exclusive level selection.

use heatlevels::components::{Demand, SourceMode, SourceTarget, TemperatureDependentSource};
use heatlevels::lp::SolverTolerances;
use heatlevels::network::{solve_network, FlowSpec, NetworkModel, ObjectiveKind, TimeGrid};
use heatlevels::thermo::{Medium, TemperatureLadder};

fn network(mode: SourceMode) -> Result<NetworkModel, Box<dyn std::error::Error>> {
    let mut net = NetworkModel::new(TimeGrid::hourly(4)?);
    net.add_circuit("c", TemperatureLadder::from_celsius(&[10.0, 30.0, 60.0])?, Medium::water());
    // Backup heat at the top level, expensive.
    net.add_flow(FlowSpec::new("boiler", None, Some("c_h2")).with_price(1e-7));
    net.add_component(TemperatureDependentSource {
        id: "solar".into(),
        targets: vec![
            SourceTarget { circuit: "c".into(), level: 1, max: 5e3.into(), price: 0.0.into(), exergy: 0.0.into() },
            SourceTarget { circuit: "c".into(), level: 2, max: 2e3.into(), price: 0.0.into(), exergy: 0.0.into() },
        ],
        mode,
        block_steps: 2,
    });
    for (id, level, q) in [("low", 1, 3e3), ("high", 2, 1e3)] {
        net.add_component(Demand {
            id: id.into(),
            circuit: "c".into(),
            demand: q.into(),
            service_level: level,
            return_level: 0,
            draws: Vec::new(),
            electricity_bus: None,
        });
    }
    Ok(net)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for mode in [SourceMode::Shared, SourceMode::Exclusive] {
        let (_, s) = solve_network(&network(mode)?, ObjectiveKind::Price, &SolverTolerances::default())?;
        println!(
            "{mode:?}: cost {:.5} EUR, solar to level 1 {:?} W, to level 2 {:?} W",
            s.objective,
            s.flow("solar_c_l1").unwrap(),
            s.flow("solar_c_l2").unwrap()
        );
    }
    Ok(())
}
