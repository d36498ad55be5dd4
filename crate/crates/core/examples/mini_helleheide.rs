//! Solve the bundled scenario for both objectives and compare their KPIs.

use std::path::Path;
use std::time::Instant;

use heatlevels::network::{solve_network, ObjectiveKind};
use heatlevels::scenario::{compute_kpis, load_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/mini-helleheide/scenario.toml");
    let config = load_scenario(&path)?;
    for objective in [ObjectiveKind::Price, ObjectiveKind::Exergy] {
        let started = Instant::now();
        let (model, solution) = solve_network(&config.network, objective, &config.tolerances)?;
        let kpi = compute_kpis(&solution, &model)?;
        println!(
            "{objective:>6}: {:.2} EUR/MWh, {:.4} MWh/MWh, pumping {:.2} MWh ({:.1} s, {} columns)",
            kpi.cost_eur_per_mwh,
            kpi.exergy_per_energy,
            kpi.pump_electricity_mwh,
            started.elapsed().as_secs_f64(),
            model.program.num_variables(),
        );
        for (level, mwh) in &kpi.solar_heat_mwh {
            println!("        solar at {level}: {mwh:.2} MWh");
        }
    }
    Ok(())
}
