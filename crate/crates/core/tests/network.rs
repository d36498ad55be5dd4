use heatlevels::lp::{solve_milp, SolveStatus, SolverTolerances};
use heatlevels::network::{
    compile, extract_solution, solve_network, Carrier, FlowSpec, NetworkError, NetworkModel, ObjectiveKind, Profile,
    TimeGrid,
};
use proptest::prelude::*;

fn one_bus(steps: usize, capacity: f64, demand: f64) -> NetworkModel {
    let mut net = NetworkModel::new(TimeGrid::hourly(steps).unwrap());
    net.add_bus("b", Carrier::Electricity);
    net.add_flow(FlowSpec::new("supply", None, Some("b")).with_capacity(capacity));
    net.add_flow(FlowSpec::new("load", Some("b"), None).with_fixed(demand).as_demand());
    net
}

fn tol() -> SolverTolerances {
    SolverTolerances::default()
}

#[test]
fn source_covers_equal_demand() {
    let (model, s) = solve_network(&one_bus(1, 5.0, 5.0), ObjectiveKind::Price, &tol()).unwrap();
    assert_eq!(s.flow("supply").unwrap(), &[5.0]);
    assert_eq!(s.flow("load").unwrap(), &[5.0]);
    assert_eq!(model.program.num_constraints(), 1);
}

#[test]
fn excess_demand_is_infeasible() {
    let err = solve_network(&one_bus(1, 5.0, 6.0), ObjectiveKind::Price, &tol()).unwrap_err();
    assert_eq!(err, NetworkError::NotOptimal(SolveStatus::Infeasible));
}

#[test]
fn objective_sums_weighted_energy() {
    let mut net = one_bus(2, 1.0, 1.0);
    net.flows[0].price = Profile::series(vec![1.0, 2.0], "EUR/J");
    let (_, s) = solve_network(&net, ObjectiveKind::Price, &tol()).unwrap();
    assert_eq!(s.objective, (1.0 * 1.0 + 2.0 * 1.0) * 3600.0);
}

#[test]
fn corrupted_assignment_is_caught() {
    let net = one_bus(1, 5.0, 5.0);
    let model = compile(&net, ObjectiveKind::Price).unwrap();
    let mut result = solve_milp(&model.program).unwrap();
    let v = model.flow_variables("supply").unwrap()[0];
    result.values[v.index()] += 1e-3;
    let err = extract_solution(&result, &model, &net.grid).unwrap_err();
    assert!(matches!(err, NetworkError::Balance { ref bus, step: 0, .. } if bus == "b"), "{err}");
}

#[test]
fn non_optimal_results_are_refused() {
    let net = one_bus(1, 5.0, 6.0);
    let model = compile(&net, ObjectiveKind::Price).unwrap();
    let result = solve_milp(&model.program).unwrap();
    assert!(matches!(extract_solution(&result, &model, &net.grid), Err(NetworkError::NotOptimal(SolveStatus::Infeasible))));
}

#[test]
fn variable_map_goes_both_ways() {
    let model = compile(&one_bus(3, 5.0, 1.0), ObjectiveKind::Price).unwrap();
    for (t, v) in model.flow_variables("load").unwrap().into_iter().enumerate() {
        assert_eq!(model.variable_owner(v), Some(("load", t)));
    }
}

#[test]
fn structural_errors() {
    let mut net = one_bus(2, 5.0, 1.0);
    net.add_flow(FlowSpec::new("leak", Some("nowhere"), None));
    assert!(matches!(compile(&net, ObjectiveKind::Price), Err(NetworkError::DanglingBus { .. })));

    let mut net = one_bus(2, 5.0, 1.0);
    net.flows[0].capacity = Some(Profile::series(vec![1.0, 2.0, 3.0], "W"));
    assert!(matches!(compile(&net, ObjectiveKind::Price), Err(NetworkError::GridMismatch { expected: 2, found: 3, .. })));

    let mut net = one_bus(2, 5.0, 1.0);
    net.add_flow(FlowSpec::new("load", None, Some("b")));
    assert!(matches!(compile(&net, ObjectiveKind::Price), Err(NetworkError::DuplicateId(_))));
}

/// Two priced sources and an exergy-rated import feeding one bus.
fn market(caps: [f64; 3], prices: [f64; 3], exergy: [f64; 3], demand: Vec<f64>) -> NetworkModel {
    let steps = demand.len();
    let mut net = NetworkModel::new(TimeGrid::hourly(steps).unwrap());
    net.add_bus("b", Carrier::Electricity);
    for i in 0..3 {
        net.add_flow(
            FlowSpec::new(format!("src{i}"), None, Some("b"))
                .with_capacity(caps[i])
                .with_price(prices[i])
                .with_exergy(exergy[i]),
        );
    }
    net.add_flow(FlowSpec::new("load", Some("b"), None).with_fixed(Profile::series(demand, "W")).as_demand());
    net
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solutions_balance_and_recompute(
        caps in prop::array::uniform3(1.0..10.0f64),
        prices in prop::array::uniform3(-1.0..5.0f64),
        exergy in prop::array::uniform3(0.0..2.0f64),
        demand in prop::collection::vec(0.0..3.0f64, 1..5),
        kind in prop::sample::select(vec![ObjectiveKind::Price, ObjectiveKind::Exergy]),
    ) {
        let net = market(caps, prices, exergy, demand);
        let (model, s) = solve_network(&net, kind, &tol()).unwrap();
        let dt = net.grid.dt();
        let recomputed: f64 = model
            .flows
            .iter()
            .map(|f| {
                let w = if kind == ObjectiveKind::Price { &f.price } else { &f.exergy };
                s.flow(&f.id).unwrap().iter().zip(w).map(|(p, w)| p * w * dt).sum::<f64>()
            })
            .sum();
        prop_assert!((recomputed - s.objective).abs() <= 1e-9 * s.objective.abs().max(1.0));
        for t in 0..net.grid.steps() {
            let inflow: f64 = (0..3).map(|i| s.flow(&format!("src{i}")).unwrap()[t]).sum();
            prop_assert!((inflow - s.flow("load").unwrap()[t]).abs() <= 1e-6);
        }
    }

    #[test]
    fn objective_switch_keeps_the_matrix(
        caps in prop::array::uniform3(1.0..10.0f64),
        prices in prop::array::uniform3(-1.0..5.0f64),
        exergy in prop::array::uniform3(0.0..2.0f64),
        demand in prop::collection::vec(0.0..3.0f64, 1..5),
    ) {
        let net = market(caps, prices, exergy, demand);
        let a = compile(&net, ObjectiveKind::Price).unwrap();
        let b = compile(&net, ObjectiveKind::Exergy).unwrap();
        prop_assert_eq!(a.program.matrix_fingerprint(), b.program.matrix_fingerprint());
    }

    #[test]
    fn more_capacity_never_costs_more(
        caps in prop::array::uniform3(1.0..10.0f64),
        prices in prop::array::uniform3(-1.0..5.0f64),
        demand in prop::collection::vec(0.0..3.0f64, 1..5),
        which in 0usize..3,
        extra in 0.0..5.0f64,
    ) {
        let net = market(caps, prices, [0.0; 3], demand.clone());
        let mut bigger = caps;
        bigger[which] += extra;
        let wide = market(bigger, prices, [0.0; 3], demand);
        let (_, a) = solve_network(&net, ObjectiveKind::Price, &tol()).unwrap();
        let (_, b) = solve_network(&wide, ObjectiveKind::Price, &tol()).unwrap();
        prop_assert!(b.objective <= a.objective + 1e-9 * a.objective.abs().max(1.0));
    }
}
