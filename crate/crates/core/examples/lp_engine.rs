//! The embedded solvers on a tiny unit-commitment problem, plus the LP text
//! round trip.

use heatlevels::lp::{export_lp_text, parse_lp_text, solve_milp, solve_relaxation, ConstraintSense, LinearProgram};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two units cover a demand of 7. The cheap unit has a start-up block
    // that can only be bought whole.
    let mut lp = LinearProgram::new();
    let cheap = lp.add_continuous("cheap", 0.0, 10.0)?;
    let dear = lp.add_continuous("dear", 0.0, 10.0)?;
    let on = lp.add_binary("cheap_on")?;
    lp.add_constraint("demand", vec![(cheap, 1.0), (dear, 1.0)], ConstraintSense::Equal, 7.0)?;
    lp.add_constraint("commit", vec![(cheap, 1.0), (on, -10.0)], ConstraintSense::LessEqual, 0.0)?;
    lp.set_objective(cheap, 1.0)?;
    lp.set_objective(dear, 3.0)?;
    lp.set_objective(on, 12.0)?;

    let relaxed = solve_relaxation(&lp)?;
    let exact = solve_milp(&lp)?;
    println!("relaxation {:.3} (cheap_on = {:.2})", relaxed.objective, relaxed.value(on));
    println!("milp       {:.3} (cheap_on = {}) after {} nodes", exact.objective, exact.value(on), exact.nodes);

    let text = export_lp_text(&lp)?;
    print!("\n{text}");
    let again = parse_lp_text(&text)?;
    assert_eq!(export_lp_text(&again)?, text);
    Ok(())
}
