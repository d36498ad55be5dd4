//! Loss constants of a layered tank, the drift of the linearised top
//! layer against the exact solution, and the split-tank surface bookkeeping.

use heatlevels::components::{
    layer_surfaces, relative_loss, split_surface_overestimate, surface_overestimate_closed_form, time_constant,
    top_layer_height, LayeredStorage,
};
use heatlevels::thermo::Medium;

fn main() {
    let water = Medium::water();
    let tank = LayeredStorage::new("tank", "warm", 50.0, 1.5, vec![20.0, 15.0, 15.0]);
    let tau = time_constant(&water, tank.radius, tank.insulation_conductivity, tank.insulation_thickness);
    println!("tau = {:.4e} s ({:.1} days)", tau, tau / 86400.0);
    println!("hourly loss per layer: {:?}", tank.losses(&water, 3, 3600.0));

    let h0 = tank.nominal_height(3);
    let beta_top = tank.losses(&water, 3, 3600.0)[2];
    let mut linear = h0;
    println!("\n hour   exact h    linear h");
    for hour in 1..=24 {
        linear *= 1.0 - beta_top;
        if hour % 6 == 0 {
            println!("{hour:>5} {:>9.5} {:>10.5}", top_layer_height(h0, tank.radius, tau, hour as f64 * 3600.0), linear);
        }
    }

    let volumes = [20.0, 15.0, 15.0];
    println!("\nlayer surfaces {:?}", layer_surfaces(1.5, &volumes));
    println!(
        "split overestimate {:.4} m2, closed form {:.4} m2",
        split_surface_overestimate(1.5, 50.0, &volumes),
        surface_overestimate_closed_form(1.5, 50.0, &volumes)
    );
    println!("one-step loss at tau: {:.6}", relative_loss(tau, tau));
}
