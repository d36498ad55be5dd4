mod common;

use std::f64::consts::PI;

use heatlevels::components::{
    ambient_adjustment, cylinder_surface, layer_surfaces, relative_loss, split_surface_overestimate,
    surface_overestimate_closed_form, time_constant, top_layer_height, LayeredStorage, StorageRepresentation,
};
use heatlevels::lp::SolverTolerances;
use heatlevels::network::{solve_network, FlowSpec, NetworkError, NetworkModel, ObjectiveKind, Profile, TimeGrid};
use heatlevels::thermo::{Medium, TemperatureLadder};
use proptest::prelude::*;

fn tol() -> SolverTolerances {
    SolverTolerances::default()
}

#[test]
fn time_constant_of_a_one_metre_tank() {
    let tau = time_constant(&Medium::water(), 1.0, 0.04, 0.1);
    assert!((tau - 1000.0 * 4186.0 * 1.0 * 0.1 / 0.08).abs() < 1e-6);
    assert!((tau - 5.2325e6).abs() < 1e-6);
    let beta = relative_loss(3600.0, tau);
    let x = 3600.0 / tau;
    let series = x - x * x / 2.0 + x * x * x / 6.0 - x.powi(4) / 24.0;
    assert!((beta - series).abs() < 1e-16);
    assert!((beta - 6.8777e-4).abs() < 1e-8);
    assert!((beta - 6.879e-4).abs() / 6.879e-4 < 2e-4);
}

#[test]
fn exact_top_layer_solution() {
    let (h0, r, tau) = (2.0, 1.0, 5.0e6);
    assert_eq!(top_layer_height(h0, r, tau, 0.0), h0);
    // dh/dt = −(h + r/2)/τ by central difference.
    let dt = 1.0;
    let t = 1.0e5;
    let slope = (top_layer_height(h0, r, tau, t + dt) - top_layer_height(h0, r, tau, t - dt)) / (2.0 * dt);
    let h = top_layer_height(h0, r, tau, t);
    assert!((slope + (h + r / 2.0) / tau).abs() < 1e-12);
}

#[test]
fn ambient_correction_values() {
    let water = Medium::water();
    assert_eq!(ambient_adjustment(1.0, 1.0, &water), -4.186e6);
    assert_eq!(ambient_adjustment(0.0, 5.0, &water), 0.0);
    assert!(ambient_adjustment(0.5, 1.0, &water) < 0.0);
    assert!(ambient_adjustment(-0.5, 1.0, &water) > 0.0);
}

#[test]
fn constant_ambient_adds_no_heat() {
    let mut net = common::idle_tank(vec![20.0, 15.0, 15.0], 4);
    if let heatlevels::components::Component::LayeredStorage(s) = &mut net.components[0] {
        s.ambient = Some(Profile::Constant(283.15));
    }
    let (_, s) = solve_network(&net, ObjectiveKind::Price, &tol()).unwrap();
    for n in 1..3 {
        assert!(s.flow(&format!("tank_ambient_l{n}")).unwrap().iter().all(|q| *q == 0.0));
    }
}

#[test]
fn idle_layers_decay_geometrically() {
    let initial = vec![20.0, 15.0, 15.0];
    let steps = 24;
    let net = common::idle_tank(initial.clone(), steps);
    let (_, s) = solve_network(&net, ObjectiveKind::Price, &tol()).unwrap();
    let tank = match &net.components[0] {
        heatlevels::components::Component::LayeredStorage(t) => t.clone(),
        _ => unreachable!(),
    };
    let beta = tank.losses(&Medium::water(), 3, 3600.0);
    assert_eq!(beta[0], 0.0);
    assert!(beta[2] > beta[1]);
    let layers = &s.storage["tank"];
    for t in 0..=steps {
        for n in 1..3 {
            let expected = initial[n] * (1.0 - beta[n]).powi(t as i32);
            assert!((layers[n][t] - expected).abs() < 1e-9, "layer {n} step {t}: {} vs {expected}", layers[n][t]);
        }
        let total: f64 = layers.iter().map(|l| l[t]).sum();
        assert!((total - 50.0).abs() < 1e-9);
    }
}

#[test]
fn linearised_top_layer_tracks_the_exact_solution() {
    let water = Medium::water();
    let tank = LayeredStorage::new("tank", "w", 50.0, 1.5, vec![50.0, 0.0, 0.0]);
    let tau = time_constant(&water, tank.radius, tank.insulation_conductivity, tank.insulation_thickness);
    let h0 = tank.nominal_height(3);
    assert!((h0 - 50.0 / 3.0 / (PI * 1.5 * 1.5)).abs() < 1e-12);
    let beta = tank.losses(&water, 3, 3600.0)[2];
    let mut linear = h0;
    for hour in 1..=24 {
        linear *= 1.0 - beta;
        let exact = top_layer_height(h0, tank.radius, tau, hour as f64 * 3600.0);
        let lost_exact = h0 - exact;
        let lost_linear = h0 - linear;
        assert!((lost_linear - lost_exact).abs() / lost_exact < 0.02, "hour {hour}");
    }
}

#[test]
fn invalid_tanks_are_rejected() {
    let mut net = common::idle_tank(vec![20.0, 15.0, 15.0], 2);
    if let heatlevels::components::Component::LayeredStorage(s) = &mut net.components[0] {
        s.initial_volumes = vec![20.0, 15.0, 14.0];
    }
    assert!(matches!(solve_network(&net, ObjectiveKind::Price, &tol()), Err(NetworkError::Component { .. })));

    let mut net = common::idle_tank(vec![20.0, 15.0, 15.0], 2);
    if let heatlevels::components::Component::LayeredStorage(s) = &mut net.components[0] {
        s.insulation_thickness = 1e-12;
    }
    let err = solve_network(&net, ObjectiveKind::Price, &tol()).unwrap_err().to_string();
    assert!(err.contains("outside [0, 1)"), "{err}");
}

#[test]
fn split_overestimate_closed_form() {
    for k in 2..=4usize {
        let hot = 30.0 / (k - 1) as f64;
        let mut volumes = vec![20.0];
        volumes.extend(std::iter::repeat(hot).take(k - 1));
        let a = cylinder_surface(1.5, 50.0);
        let a0 = layer_surfaces(1.5, &volumes)[0];
        let split = split_surface_overestimate(1.5, 50.0, &volumes);
        let expected = (k as f64 - 2.0) * a + a0;
        assert!((split - expected).abs() <= 1e-12 * expected, "k = {k}");
        assert_eq!(surface_overestimate_closed_form(1.5, 50.0, &volumes), expected);
    }
}

#[test]
fn split_and_single_tanks_agree() {
    for k in 2..=4 {
        let (_, single) = solve_network(&common::tank_arbitrage(StorageRepresentation::SingleTank, k), ObjectiveKind::Price, &tol()).unwrap();
        let (_, split) = solve_network(&common::tank_arbitrage(StorageRepresentation::SplitTanks, k), ObjectiveKind::Price, &tol()).unwrap();
        assert!((single.objective - split.objective).abs() <= 1e-6 * single.objective.abs(), "k = {k}");
        let used: f64 = single.storage["tank"][k - 1].iter().sum();
        assert!(used > 0.0, "k = {k}: the tank should be used");
        let reported = &split.surface_overestimate["tank"];
        for (t, s) in reported.iter().enumerate() {
            let v: Vec<f64> = split.storage["tank"].iter().map(|l| l[t]).collect();
            let expected = surface_overestimate_closed_form(0.8, 4.0, &v);
            assert!((s - expected).abs() <= 1e-9 * expected, "k = {k}, step {t}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn layers_always_fill_the_tank(
        prices in prop::collection::vec(1e-9..1e-7f64, 4),
        load in prop::collection::vec(0.0..20e3f64, 4),
        fill in 0.0..1.0f64,
    ) {
        let mut net = NetworkModel::new(TimeGrid::hourly(4).unwrap());
        net.add_circuit("w", TemperatureLadder::from_celsius(&[10.0, 30.0, 45.0]).unwrap(), Medium::water());
        net.add_flow(FlowSpec::new("boiler", None, Some("w_h2")).with_capacity(60e3).with_price(Profile::series(prices, "EUR/J")));
        net.add_flow(FlowSpec::new("load", Some("w_h1"), None).with_fixed(Profile::series(load, "W")));
        let initial = vec![3.0 * (1.0 - fill), 3.0 * fill / 2.0, 3.0 * fill / 2.0];
        net.add_component(LayeredStorage::new("tank", "w", 3.0, 0.7, initial));
        let (_, s) = solve_network(&net, ObjectiveKind::Price, &tol()).unwrap();
        let layers = &s.storage["tank"];
        for t in 0..=4 {
            let total: f64 = layers.iter().map(|l| l[t]).sum();
            prop_assert!((total - 3.0).abs() <= 1e-9);
            prop_assert!(layers.iter().all(|l| l[t] >= -1e-9));
        }
    }
}
