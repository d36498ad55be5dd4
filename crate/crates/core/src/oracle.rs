//! Brute-force dispatch enumerator for tiny networks.
//!
//! The network is compiled as usual, but the program is never handed to the
//! simplex. Equality rows are reduced by Gauss-Jordan elimination; the
//! columns left without a pivot are the decisions. Every decision is
//! gridded uniformly over its bounds, the pivot columns are recovered from
//! the reduced rows, and each point is checked against every compiled row
//! and bound.

use std::thread;

use thiserror::Error;

use crate::lp::{ConstraintSense, LinearProgram, VariableId, VariableKind};
use crate::network::{compile, NetworkError, NetworkModel, ObjectiveKind};

/// Largest number of grid points the enumerator agrees to visit.
pub const COMBINATION_GUARD: f64 = 1e7;
/// Longest horizon the enumerator accepts.
pub const MAX_STEPS: usize = 3;
const PIVOT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{count} grid points exceed the guard of {guard}")]
    TooManyCombinations { count: f64, guard: f64 },
    #[error("horizon of {0} steps exceeds the oracle limit of 3")]
    Horizon(usize),
    #[error("at least 2 grid points per decision are required, got {0}")]
    TooFewPoints(usize),
    #[error("decision {0} has an unbounded range and cannot be gridded")]
    UnboundedDecision(String),
    #[error("variable {0} was requested as a decision but is fixed by its bounds")]
    FixedDecision(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Discretisation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationGrid {
    /// Points per decision, including both bounds.
    pub points: usize,
    /// Accepted row-scaled violation of a grid point.
    pub tolerance: f64,
    /// Columns to grid; chosen automatically when `None`.
    pub decisions: Option<Vec<VariableId>>,
    pub threads: usize,
}

impl EnumerationGrid {
    pub fn new(points: usize) -> Self {
        let threads = thread::available_parallelism().map_or(1, |n| n.get()).min(8);
        Self { points, tolerance: 1e-6, decisions: None, threads }
    }
}

/// Best grid point found.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Objective including constant terms, comparable with the solved model.
    pub objective: f64,
    pub values: Vec<f64>,
    pub decisions: Vec<VariableId>,
    pub evaluated: u64,
    pub feasible: u64,
}

/// Reduced equality system: `x[pivot_col[i]] = rhs[i] − Σ_j coef[i][j]·x[decision j]`.
struct Reduced {
    pivots: Vec<usize>,
    rhs: Vec<f64>,
    coef: Vec<Vec<f64>>,
    decisions: Vec<usize>,
}

fn reduce(program: &LinearProgram, forced: Option<&[usize]>) -> Result<Reduced, OracleError> {
    let vars = program.variables();
    let n = vars.len();
    let fixed: Vec<bool> = vars.iter().map(|v| v.lower == v.upper).collect();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for c in program.constraints().iter().filter(|c| c.sense == ConstraintSense::Equal) {
        let mut row = vec![0.0; n];
        let mut b = c.rhs;
        for &(v, a) in &c.terms {
            if fixed[v.index()] {
                b -= a * vars[v.index()].lower;
            } else {
                row[v.index()] += a;
            }
        }
        rows.push(row);
        rhs.push(b);
    }

    // Unbounded columns are eliminated first; among the rest, later columns
    // (flows derived by components) are preferred as pivots.
    let mut order: Vec<usize> = (0..n).filter(|&j| !fixed[j]).collect();
    if let Some(f) = forced {
        order.retain(|j| !f.contains(j));
    }
    order.retain(|&j| vars[j].kind == VariableKind::Continuous);
    order.sort_by_key(|&j| (vars[j].upper.is_finite(), std::cmp::Reverse(j)));

    let m = rows.len();
    let mut used = vec![false; m];
    let mut pivot_of_row = vec![usize::MAX; m];
    for &j in &order {
        let mut best = None;
        let mut best_abs = PIVOT_TOLERANCE;
        for i in 0..m {
            if !used[i] && rows[i][j].abs() > best_abs {
                best_abs = rows[i][j].abs();
                best = Some(i);
            }
        }
        let Some(p) = best else { continue };
        used[p] = true;
        pivot_of_row[p] = j;
        let scale = rows[p][j];
        for v in rows[p].iter_mut() {
            *v /= scale;
        }
        rhs[p] /= scale;
        let pivot_row = rows[p].clone();
        let pivot_rhs = rhs[p];
        for i in 0..m {
            if i != p && rows[i][j] != 0.0 {
                let f = rows[i][j];
                for (v, pv) in rows[i].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                rhs[i] -= f * pivot_rhs;
            }
        }
    }
    let pivot_cols: Vec<usize> = pivot_of_row.iter().copied().filter(|&j| j != usize::MAX).collect();
    let decisions: Vec<usize> = (0..n).filter(|&j| !fixed[j] && !pivot_cols.contains(&j)).collect();
    let mut out = Reduced { pivots: Vec::new(), rhs: Vec::new(), coef: Vec::new(), decisions };
    for i in 0..m {
        let j = pivot_of_row[i];
        if j == usize::MAX {
            continue;
        }
        out.pivots.push(j);
        out.rhs.push(rhs[i]);
        out.coef.push(out.decisions.iter().map(|&d| rows[i][d]).collect());
    }
    Ok(out)
}

fn scaled_violation(program: &LinearProgram, x: &[f64]) -> f64 {
    let rows = program.constraints().iter().map(|c| c.scaled_violation(x)).fold(0.0, f64::max);
    let bounds = program
        .variables()
        .iter()
        .zip(x)
        .map(|(v, &xi)| {
            let scale = v.lower.abs().max(if v.upper.is_finite() { v.upper.abs() } else { 0.0 }).max(1.0);
            (v.lower - xi).max(xi - v.upper).max(0.0) / scale
        })
        .fold(0.0, f64::max);
    rows.max(bounds)
}

/// Exhaustively grid the decisions of `net` and return the best feasible
/// point, or `None` when no grid point is feasible.
pub fn enumerate_best(
    net: &NetworkModel,
    objective: ObjectiveKind,
    grid: &EnumerationGrid,
) -> Result<Option<OracleResult>, OracleError> {
    if net.grid.steps() > MAX_STEPS {
        return Err(OracleError::Horizon(net.grid.steps()));
    }
    if grid.points < 2 {
        return Err(OracleError::TooFewPoints(grid.points));
    }
    let model = compile(net, objective)?;
    let program = &model.program;
    let vars = program.variables();
    let forced: Option<Vec<usize>> = grid.decisions.as_ref().map(|d| d.iter().map(|v| v.index()).collect());
    if let Some(f) = &forced {
        for &j in f {
            if vars[j].lower == vars[j].upper {
                return Err(OracleError::FixedDecision(vars[j].name.clone()));
            }
        }
    }
    let reduced = reduce(program, forced.as_deref())?;
    for &j in &reduced.decisions {
        if !vars[j].upper.is_finite() {
            return Err(OracleError::UnboundedDecision(vars[j].name.clone()));
        }
    }
    // Binaries are gridded over {0, 1} only.
    let radix: Vec<u64> = reduced
        .decisions
        .iter()
        .map(|&j| if vars[j].kind == VariableKind::Binary { 2 } else { grid.points as u64 })
        .collect();
    let count: f64 = radix.iter().map(|&r| r as f64).product();
    if count > COMBINATION_GUARD {
        return Err(OracleError::TooManyCombinations { count, guard: COMBINATION_GUARD });
    }
    let total = count as u64;
    let threads = grid.threads.max(1).min(total.max(1) as usize);
    let chunk = total.div_ceil(threads as u64);

    let base: Vec<f64> = vars.iter().map(|v| if v.lower == v.upper { v.lower } else { 0.0 }).collect();
    let point = |index: u64, x: &mut Vec<f64>| {
        x.copy_from_slice(&base);
        let mut rest = index;
        for (&j, &r) in reduced.decisions.iter().zip(&radix) {
            let i = rest % r;
            rest /= r;
            let (lo, hi) = (vars[j].lower, vars[j].upper);
            x[j] = if i == r - 1 { hi } else { lo + (hi - lo) * i as f64 / (r - 1) as f64 };
        }
        for (r, &p) in reduced.pivots.iter().enumerate() {
            let mut v = reduced.rhs[r];
            for (k, &j) in reduced.decisions.iter().enumerate() {
                v -= reduced.coef[r][k] * x[j];
            }
            x[p] = v;
        }
    };

    let partial: Vec<(Option<(f64, u64)>, u64)> = thread::scope(|s| {
        let handles: Vec<_> = (0..threads as u64)
            .map(|k| {
                let point = &point;
                s.spawn(move || {
                    let mut x = vec![0.0; vars.len()];
                    let mut best: Option<(f64, u64)> = None;
                    let mut feasible = 0u64;
                    for index in k * chunk..((k + 1) * chunk).min(total) {
                        point(index, &mut x);
                        if scaled_violation(program, &x) > grid.tolerance {
                            continue;
                        }
                        feasible += 1;
                        let obj = program.objective_value(&x);
                        if best.is_none_or(|(b, _)| obj < b) {
                            best = Some((obj, index));
                        }
                    }
                    (best, feasible)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("oracle worker panicked")).collect()
    });

    // Chunks are visited in index order, so keeping the first strict
    // minimum reproduces the single-threaded result.
    let mut best: Option<(f64, u64)> = None;
    let mut feasible = 0;
    for (b, f) in partial {
        feasible += f;
        if let Some((obj, idx)) = b {
            if best.is_none_or(|(bo, _)| obj < bo) {
                best = Some((obj, idx));
            }
        }
    }
    Ok(best.map(|(obj, idx)| {
        let mut x = vec![0.0; vars.len()];
        point(idx, &mut x);
        OracleResult {
            objective: obj + model.objective_offset,
            values: x,
            decisions: reduced.decisions.iter().map(|&j| VariableId(j)).collect(),
            evaluated: total,
            feasible,
        }
    }))
}
