//! Check the solver against exhaustive enumeration on a two-step storage
//! arbitrage problem.

use heatlevels::components::LayeredStorage;
use heatlevels::lp::SolverTolerances;
use heatlevels::network::{solve_network, FlowSpec, NetworkModel, ObjectiveKind, Profile, TimeGrid};
use heatlevels::oracle::{enumerate_best, EnumerationGrid};
use heatlevels::thermo::{Medium, TemperatureLadder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut net = NetworkModel::new(TimeGrid::hourly(2)?);
    net.add_circuit("w", TemperatureLadder::from_celsius(&[10.0, 50.0])?, Medium::water());
    let price = Profile::series(vec![1e-8, 1e-7], "EUR/J");
    net.add_flow(FlowSpec::new("heat_buy", None, Some("w_h1")).with_capacity(60e3).with_price(price));
    net.add_flow(FlowSpec::new("load", Some("w_h1"), None).with_fixed(20e3).as_demand());
    let mut tank = LayeredStorage::new("tank", "w", 2.0, 0.6, vec![2.0, 0.0]);
    tank.max_charge = Some(Profile::series(vec![60e3, 0.0], "W"));
    tank.max_discharge = Some(Profile::series(vec![0.0, 60e3], "W"));
    net.add_component(tank);

    let (_, solution) = solve_network(&net, ObjectiveKind::Price, &SolverTolerances::default())?;
    for points in [11, 101, 1001] {
        let best = enumerate_best(&net, ObjectiveKind::Price, &EnumerationGrid::new(points))?.expect("feasible grid point");
        println!(
            "m = {points:>4}: enumerated {:.6e}, solver {:.6e}, gap {:.3e} ({} of {} points feasible)",
            best.objective,
            solution.objective,
            (best.objective - solution.objective) / solution.objective,
            best.feasible,
            best.evaluated
        );
    }
    Ok(())
}
