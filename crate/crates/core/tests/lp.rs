mod common;

use heatlevels::lp::{
    export_lp_text, parse_lp_text, solve_lp, solve_milp, solve_relaxation, ConstraintSense, LinearProgram, SolveStatus,
};
use proptest::prelude::*;

fn textbook_pair() -> LinearProgram {
    let mut lp = LinearProgram::new();
    let x = lp.add_continuous("x", 0.0, 1.0).unwrap();
    let y = lp.add_continuous("y", 0.0, 1.0).unwrap();
    lp.add_constraint("cap", vec![(x, 1.0), (y, 1.0)], ConstraintSense::LessEqual, 1.0).unwrap();
    lp.set_objective(x, -1.0).unwrap();
    lp.set_objective(y, -1.0).unwrap();
    lp
}

#[test]
fn lower_bound_row() {
    let mut lp = LinearProgram::new();
    let x = lp.add_continuous("x", 0.0, 10.0).unwrap();
    lp.add_constraint("floor", vec![(x, 1.0)], ConstraintSense::GreaterEqual, 3.0).unwrap();
    lp.set_objective(x, 1.0).unwrap();
    let r = solve_lp(&lp).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.value(x) - 3.0).abs() < 1e-9);
    assert!((r.objective - 3.0).abs() < 1e-9);
}

#[test]
fn pair_with_shared_capacity() {
    let r = solve_lp(&textbook_pair()).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.objective + 1.0).abs() < 1e-9);
}

#[test]
fn contradictory_bounds() {
    let mut lp = LinearProgram::new();
    let x = lp.add_continuous("x", 0.0, f64::INFINITY).unwrap();
    lp.add_constraint("lo", vec![(x, 1.0)], ConstraintSense::GreaterEqual, 2.0).unwrap();
    lp.add_constraint("hi", vec![(x, 1.0)], ConstraintSense::LessEqual, 1.0).unwrap();
    assert_eq!(solve_lp(&lp).unwrap().status, SolveStatus::Infeasible);
}

#[test]
fn binary_cannot_round_up() {
    let mut lp = LinearProgram::new();
    let x = lp.add_binary("x").unwrap();
    lp.add_constraint("half", vec![(x, 1.0)], ConstraintSense::LessEqual, 0.5).unwrap();
    lp.set_objective(x, -1.0).unwrap();
    let r = solve_milp(&lp).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert_eq!(r.value(x), 0.0);
    assert_eq!(r.objective, 0.0);
}

#[test]
fn binary_tie_goes_to_lower_id() {
    let mut lp = LinearProgram::new();
    let x = lp.add_binary("x").unwrap();
    let y = lp.add_binary("y").unwrap();
    lp.add_constraint("one", vec![(x, 1.0), (y, 1.0)], ConstraintSense::LessEqual, 1.0).unwrap();
    lp.set_objective(x, -1.0).unwrap();
    lp.set_objective(y, -1.0).unwrap();
    let r = solve_milp(&lp).unwrap();
    assert!((r.objective + 1.0).abs() < 1e-9);
    assert_eq!((r.value(x), r.value(y)), (1.0, 0.0));
}

#[test]
fn milp_without_binaries_is_the_lp() {
    let lp = textbook_pair();
    let a = solve_lp(&lp).unwrap();
    let b = solve_milp(&lp).unwrap();
    assert_eq!(a.values, b.values);
    assert_eq!(a.objective.to_bits(), b.objective.to_bits());
}

#[test]
fn export_sections() {
    let mut lp = LinearProgram::new();
    let x = lp.add_continuous("x", 0.0, 4.0).unwrap();
    let s = lp.add_binary("s").unwrap();
    lp.add_constraint("link", vec![(x, 1.0), (s, -4.0)], ConstraintSense::LessEqual, 0.0).unwrap();
    let text = export_lp_text(&lp).unwrap();
    let at = |needle: &str| text.find(needle).unwrap_or_else(|| panic!("{needle:?} missing from\n{text}"));
    assert!(at("Minimize") < at("Subject To"));
    assert!(at("Subject To") < at("Bounds"));
    assert!(at("Bounds") < at("Binary"));
    assert!(at("Binary") < at("End"));
    assert!(text[at("Binary")..].contains(" s"));
}

#[test]
fn textbook_pair_agrees_with_highs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.lp");
    std::fs::write(&path, export_lp_text(&textbook_pair()).unwrap()).unwrap();
    match common::highs_solve(&path) {
        Some((status, objective)) => {
            assert_eq!(status, "Optimal");
            assert!((objective + 1.0).abs() < 1e-9);
        }
        None => eprintln!("highspy unavailable; external cross-check skipped"),
    }
}

/// Random LP `min c·x, A x ≤ b, 0 ≤ x ≤ 10` built around a chosen optimum:
/// active rows carry non-negative duals, inactive rows slack, and the
/// reduced costs agree in sign with the bound each variable sits on.
#[derive(Debug, Clone)]
struct Constructed {
    a: Vec<Vec<f64>>,
    x: Vec<f64>,
    active: Vec<bool>,
    duals: Vec<f64>,
    slack: Vec<f64>,
    position: Vec<u8>,
    reduced: Vec<f64>,
}

fn constructed() -> impl Strategy<Value = Constructed> {
    (
        prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 5), 5),
        prop::collection::vec(0.5..9.5f64, 5),
        prop::collection::vec(any::<bool>(), 5),
        prop::collection::vec(0.1..3.0f64, 5),
        prop::collection::vec(0.1..5.0f64, 5),
        prop::collection::vec(0u8..3, 5),
        prop::collection::vec(0.1..3.0f64, 5),
    )
        .prop_map(|(a, x, active, duals, slack, position, reduced)| Constructed { a, x, active, duals, slack, position, reduced })
}

impl Constructed {
    fn build(&self) -> (LinearProgram, f64) {
        let mut lp = LinearProgram::new();
        let x: Vec<f64> = self
            .x
            .iter()
            .zip(&self.position)
            .map(|(&v, p)| match p {
                0 => 0.0,
                1 => 10.0,
                _ => v,
            })
            .collect();
        let vars: Vec<_> = (0..5).map(|j| lp.add_continuous(format!("x{j}"), 0.0, 10.0).unwrap()).collect();
        let mut c = vec![0.0; 5];
        for (i, row) in self.a.iter().enumerate() {
            let activity: f64 = row.iter().zip(&x).map(|(a, v)| a * v).sum();
            let (rhs, y) = if self.active[i] { (activity, self.duals[i]) } else { (activity + self.slack[i], 0.0) };
            let terms = vars.iter().zip(row).map(|(&v, &a)| (v, a)).collect();
            lp.add_constraint(format!("r{i}"), terms, ConstraintSense::LessEqual, rhs).unwrap();
            for j in 0..5 {
                c[j] -= row[j] * y;
            }
        }
        for j in 0..5 {
            c[j] += match self.position[j] {
                0 => self.reduced[j],
                1 => -self.reduced[j],
                _ => 0.0,
            };
            lp.set_objective(vars[j], c[j]).unwrap();
        }
        let optimum = c.iter().zip(&x).map(|(c, x)| c * x).sum();
        (lp, optimum)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn constructed_optimum_is_found(case in constructed()) {
        let (lp, optimum) = case.build();
        let r = solve_lp(&lp).unwrap();
        prop_assert_eq!(r.status, SolveStatus::Optimal);
        prop_assert!((r.objective - optimum).abs() <= 1e-6 * optimum.abs().max(1.0), "{} vs {}", r.objective, optimum);
        prop_assert!(lp.max_violation(&r.values) <= 1e-7);
        prop_assert!((lp.objective_value(&r.values) - r.objective).abs() <= 1e-9 * r.objective.abs().max(1.0));
    }

    #[test]
    fn solving_is_deterministic(case in constructed()) {
        let (lp, _) = case.build();
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        prop_assert_eq!(a.objective.to_bits(), b.objective.to_bits());
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a.values), bits(&b.values));
    }

    #[test]
    fn export_round_trip_is_stable(case in constructed(), binary in prop::collection::vec(any::<bool>(), 3)) {
        let (mut lp, _) = case.build();
        for (i, b) in binary.iter().enumerate() {
            if *b {
                lp.add_binary(format!("s{i}")).unwrap();
            }
        }
        let text = export_lp_text(&lp).unwrap();
        let parsed = parse_lp_text(&text).unwrap();
        prop_assert_eq!(export_lp_text(&parsed).unwrap(), text);
        prop_assert_eq!(parsed.matrix_fingerprint(), lp.matrix_fingerprint());
    }

    #[test]
    fn milp_is_bounded_by_its_relaxation(
        weights in prop::collection::vec(1.0..10.0f64, 6),
        values in prop::collection::vec(1.0..10.0f64, 6),
        capacity in 5.0..30.0f64,
    ) {
        let mut lp = LinearProgram::new();
        let vars: Vec<_> = (0..6).map(|j| lp.add_binary(format!("b{j}")).unwrap()).collect();
        let terms = vars.iter().zip(&weights).map(|(&v, &w)| (v, w)).collect();
        lp.add_constraint("knap", terms, ConstraintSense::LessEqual, capacity).unwrap();
        for (v, p) in vars.iter().zip(&values) {
            lp.set_objective(*v, -p).unwrap();
        }
        let relaxed = solve_relaxation(&lp).unwrap();
        let integral = solve_milp(&lp).unwrap();
        prop_assert!(integral.objective >= relaxed.objective - 1e-9);
        prop_assert!(integral.values.iter().all(|v| *v == 0.0 || *v == 1.0));
        // Exhaustive check of the 64 subsets.
        let mut best = 0.0f64;
        for mask in 0u32..64 {
            let w: f64 = (0..6).filter(|j| mask >> j & 1 == 1).map(|j| weights[j]).sum();
            if w <= capacity + 1e-9 {
                best = best.min(-(0..6).filter(|j| mask >> j & 1 == 1).map(|j| values[j]).sum::<f64>());
            }
        }
        prop_assert!((integral.objective - best).abs() <= 1e-9 * best.abs().max(1.0));
    }
}
