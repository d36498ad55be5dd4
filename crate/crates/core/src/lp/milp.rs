//! Depth-first branch-and-bound over binary variables.

use super::simplex::Simplex;
use super::{LinearProgram, LpError, SolveResult, SolveStatus, SolverTolerances, VariableKind};

/// Solve a mixed-binary program to optimality.
///
/// Nodes are explored depth first. The branching variable is the fractional
/// binary with the lowest index and the down branch (`= 0`) is taken first.
/// A node is pruned when its relaxation bound cannot beat the incumbent.
pub fn solve_milp(program: &LinearProgram) -> Result<SolveResult, LpError> {
    solve_milp_with(program, &SolverTolerances::default())
}

pub fn solve_milp_with(program: &LinearProgram, tol: &SolverTolerances) -> Result<SolveResult, LpError> {
    let binaries: Vec<usize> = program
        .variables()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VariableKind::Binary)
        .map(|(j, _)| j)
        .collect();
    let root_bounds: Vec<(f64, f64)> = binaries
        .iter()
        .map(|&j| (program.variables()[j].lower, program.variables()[j].upper))
        .collect();

    let mut simplex = Simplex::new(program, *tol);
    let mut nodes = 0usize;
    let mut incumbent: Option<SolveResult> = None;
    // Each node is the list of (binary slot, fixed value) decisions on its
    // path together with its parent's relaxation bound.
    let mut stack: Vec<(Vec<(usize, f64)>, f64)> = vec![(Vec::new(), f64::NEG_INFINITY)];

    while let Some((fixings, bound)) = stack.pop() {
        if let Some(best) = &incumbent {
            if bound >= best.objective - prune_gap(best.objective) {
                continue;
            }
        }
        nodes += 1;
        for (slot, &j) in binaries.iter().enumerate() {
            let (lo, hi) = root_bounds[slot];
            simplex.set_bounds(j, lo, hi);
        }
        for &(slot, value) in &fixings {
            simplex.set_bounds(binaries[slot], value, value);
        }
        let status = if nodes == 1 { simplex.run()? } else { simplex.reoptimize()? };
        match status {
            SolveStatus::Infeasible => continue,
            // Binaries are bounded, so an unbounded subtree means an
            // unbounded program.
            SolveStatus::Unbounded => {
                return Ok(SolveResult::without_solution(SolveStatus::Unbounded, simplex.iterations(), nodes));
            }
            SolveStatus::Optimal => {}
        }
        let relaxed = simplex.result(program, SolveStatus::Optimal, nodes);
        if let Some(best) = &incumbent {
            if relaxed.objective >= best.objective - prune_gap(best.objective) {
                continue;
            }
        }
        let fractional = binaries.iter().enumerate().find(|&(_, &j)| {
            let x = relaxed.values[j];
            (x - x.round()).abs() > tol.integrality
        });
        match fractional {
            Some((slot, _)) => {
                let mut up = fixings.clone();
                up.push((slot, 1.0));
                let mut down = fixings;
                down.push((slot, 0.0));
                stack.push((up, relaxed.objective));
                stack.push((down, relaxed.objective));
            }
            None => {
                // Integral: pin every binary and re-solve the remaining LP so
                // the reported point carries exact 0/1 values.
                for &j in &binaries {
                    let v = relaxed.values[j].round();
                    simplex.set_bounds(j, v, v);
                }
                if simplex.reoptimize()? != SolveStatus::Optimal {
                    continue;
                }
                let mut exact = simplex.result(program, SolveStatus::Optimal, nodes);
                for &j in &binaries {
                    exact.values[j] = relaxed.values[j].round();
                }
                exact.objective = program.objective_value(&exact.values);
                let better = incumbent
                    .as_ref()
                    .map_or(true, |best| exact.objective < best.objective - prune_gap(best.objective));
                if better {
                    incumbent = Some(exact);
                }
            }
        }
    }

    let iterations = simplex.iterations();
    Ok(match incumbent {
        Some(mut best) => {
            best.iterations = iterations;
            best.nodes = nodes;
            best
        }
        None => SolveResult::without_solution(SolveStatus::Infeasible, iterations, nodes),
    })
}

fn prune_gap(objective: f64) -> f64 {
    1e-9 * objective.abs().max(1.0)
}
