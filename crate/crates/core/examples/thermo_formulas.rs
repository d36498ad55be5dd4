//! Ladder arithmetic and the heat pump COP band over the soil temperature
//! range of the bundled scenario.

use heatlevels::thermo::{carnot_efficiency, exergy_weight, heat_pump_cop, Temperature, TemperatureLadder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ladder = TemperatureLadder::from_celsius(&[10.0, 30.0, 45.0])?;
    for n in 1..ladder.len() {
        for m in 0..n {
            println!("r({n},{m}) = {:.6}", ladder.ratio(n, m)?);
        }
    }

    let ambient = Temperature::celsius(0.0)?;
    for c in [15.0, 30.0, 45.0] {
        let t = Temperature::celsius(c)?;
        println!("{c:>4} degC: carnot {:.4}, exergy weight {:.4}", carnot_efficiency(ambient, t)?, exergy_weight(t, ambient));
    }

    println!("\n  T_soil    COP30    COP45");
    let sink30 = Temperature::celsius(30.0)?;
    let sink45 = Temperature::celsius(45.0)?;
    for i in 0..=6 {
        let soil = Temperature::kelvin(276.7 + (290.2 - 276.7) * i as f64 / 6.0)?;
        println!(
            "{:>8.2} {:>8.3} {:>8.3}",
            soil.as_kelvin(),
            heat_pump_cop(soil, sink30, 0.30)?,
            heat_pump_cop(soil, sink45, 0.30)?
        );
    }
    Ok(())
}
