//! Solver-agnostic linear / mixed-binary program representation and the
//! embedded solvers.
//!
//! Programs are always minimisations. Variables carry a finite lower bound
//! and a finite or infinite upper bound; binaries are restricted to [0, 1].

mod lpfile;
mod lu;
mod milp;
mod simplex;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

pub use lpfile::{export_lp_text, parse_lp_text};
pub use milp::{solve_milp, solve_milp_with};
pub use simplex::{solve_lp, solve_lp_with, solve_relaxation, solve_relaxation_with};

/// Longest variable or constraint name accepted by the LP text format.
pub const MAX_NAME_LEN: usize = 255;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("invalid name {0:?}: names must match [A-Za-z_][A-Za-z0-9_]* and be at most 255 characters")]
    InvalidName(String),
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("variable {name}: invalid bounds [{lower}, {upper}]")]
    InvalidBounds { name: String, lower: f64, upper: f64 },
    #[error("constraint {constraint}: unknown variable index {index}")]
    UnknownVariable { constraint: String, index: usize },
    #[error("constraint {constraint}: variable {variable} appears more than once")]
    DuplicateTerm { constraint: String, variable: String },
    #[error("{context}: non-finite coefficient {value}")]
    NonFinite { context: String, value: f64 },
    #[error("program contains binary variables; use solve_milp")]
    HasBinaries,
    #[error("simplex iteration limit ({0}) reached")]
    IterationLimit(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("LP text, line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Opaque handle to a variable of a [`LinearProgram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariableId(pub(crate) usize);

impl VariableId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VariableKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSense {
    LessEqual,
    Equal,
    GreaterEqual,
}

impl fmt::Display for ConstraintSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintSense::LessEqual => "<=",
            ConstraintSense::Equal => "=",
            ConstraintSense::GreaterEqual => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub name: String,
    pub terms: Vec<(VariableId, f64)>,
    pub sense: ConstraintSense,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v.0]).sum()
    }

    /// Amount by which `values` violate this row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let act = self.activity(values);
        match self.sense {
            ConstraintSense::LessEqual => (act - self.rhs).max(0.0),
            ConstraintSense::GreaterEqual => (self.rhs - act).max(0.0),
            ConstraintSense::Equal => (act - self.rhs).abs(),
        }
    }

    /// Violation divided by the largest absolute coefficient of the row.
    pub fn scaled_violation(&self, values: &[f64]) -> f64 {
        let norm = self.terms.iter().map(|t| t.1.abs()).fold(0.0, f64::max);
        let v = self.violation(values);
        if norm > 0.0 {
            v / norm
        } else {
            v
        }
    }
}

/// A minimisation problem over bounded continuous and binary variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    variables: Vec<Variable>,
    constraints: Vec<LinearConstraint>,
    objective: Vec<f64>,
    names: HashSet<String>,
}

pub(crate) fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    name.len() <= MAX_NAME_LEN && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    fn claim_name(&mut self, name: &str) -> Result<(), LpError> {
        if !valid_name(name) {
            return Err(LpError::InvalidName(name.to_string()));
        }
        if !self.names.insert(name.to_string()) {
            return Err(LpError::DuplicateName(name.to_string()));
        }
        Ok(())
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        kind: VariableKind,
    ) -> Result<VariableId, LpError> {
        let name = name.into();
        let bad_bounds = !lower.is_finite()
            || upper.is_nan()
            || upper == f64::NEG_INFINITY
            || lower > upper
            || (kind == VariableKind::Binary && (lower < 0.0 || upper > 1.0));
        if bad_bounds {
            return Err(LpError::InvalidBounds { name, lower, upper });
        }
        self.claim_name(&name)?;
        self.variables.push(Variable { name, lower, upper, kind });
        self.objective.push(0.0);
        Ok(VariableId(self.variables.len() - 1))
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Result<VariableId, LpError> {
        self.add_variable(name, lower, upper, VariableKind::Continuous)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VariableId, LpError> {
        self.add_variable(name, 0.0, 1.0, VariableKind::Binary)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VariableId, f64)>,
        sense: ConstraintSense,
        rhs: f64,
    ) -> Result<usize, LpError> {
        let name = name.into();
        if !rhs.is_finite() {
            return Err(LpError::NonFinite { context: name, value: rhs });
        }
        let mut seen = HashSet::with_capacity(terms.len());
        for &(v, a) in &terms {
            if v.0 >= self.variables.len() {
                return Err(LpError::UnknownVariable { constraint: name, index: v.0 });
            }
            if !a.is_finite() {
                return Err(LpError::NonFinite { context: name, value: a });
            }
            if !seen.insert(v.0) {
                return Err(LpError::DuplicateTerm { constraint: name, variable: self.variables[v.0].name.clone() });
            }
        }
        self.claim_name(&name)?;
        self.constraints.push(LinearConstraint { name, terms, sense, rhs });
        Ok(self.constraints.len() - 1)
    }

    pub fn set_objective(&mut self, var: VariableId, coefficient: f64) -> Result<(), LpError> {
        if !coefficient.is_finite() {
            return Err(LpError::NonFinite { context: format!("objective of {}", self.variables[var.0].name), value: coefficient });
        }
        self.objective[var.0] = coefficient;
        Ok(())
    }

    pub fn add_objective(&mut self, var: VariableId, coefficient: f64) -> Result<(), LpError> {
        let c = self.objective[var.0] + coefficient;
        self.set_objective(var, c)
    }

    /// Tighten or relax the bounds of an existing variable.
    pub fn set_bounds(&mut self, var: VariableId, lower: f64, upper: f64) -> Result<(), LpError> {
        let v = &self.variables[var.0];
        if !lower.is_finite() || upper.is_nan() || lower > upper {
            return Err(LpError::InvalidBounds { name: v.name.clone(), lower, upper });
        }
        let v = &mut self.variables[var.0];
        v.lower = lower;
        v.upper = upper;
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, var: VariableId) -> &Variable {
        &self.variables[var.0]
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn has_binaries(&self) -> bool {
        self.variables.iter().any(|v| v.kind == VariableKind::Binary)
    }

    pub fn variable_by_name(&self, name: &str) -> Option<VariableId> {
        self.variables.iter().position(|v| v.name == name).map(VariableId)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().zip(values).map(|(c, x)| c * x).sum()
    }

    /// Largest row-scaled constraint violation and bound violation of `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| c.scaled_violation(values)).fold(0.0, f64::max);
        let bounds = self
            .variables
            .iter()
            .zip(values)
            .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }

    /// Deterministic digest of the constraint matrix, bounds and senses; the
    /// objective is excluded.
    pub fn matrix_fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for v in &self.variables {
            v.name.hash(&mut h);
            v.lower.to_bits().hash(&mut h);
            v.upper.to_bits().hash(&mut h);
            (v.kind == VariableKind::Binary).hash(&mut h);
        }
        for c in &self.constraints {
            c.name.hash(&mut h);
            c.rhs.to_bits().hash(&mut h);
            c.sense.to_string().hash(&mut h);
            for (v, a) in &c.terms {
                v.0.hash(&mut h);
                a.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }
}

/// Centralised solver tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverTolerances {
    /// Absolute primal feasibility, applied after row scaling.
    pub feasibility: f64,
    /// Reduced-cost tolerance on the normalised objective.
    pub optimality: f64,
    /// Distance from 0/1 accepted as integral.
    pub integrality: f64,
}

impl Default for SolverTolerances {
    fn default() -> Self {
        Self { feasibility: 1e-7, optimality: 1e-9, integrality: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "OPTIMAL",
            SolveStatus::Infeasible => "INFEASIBLE",
            SolveStatus::Unbounded => "UNBOUNDED",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Objective at `values`; NaN unless optimal.
    pub objective: f64,
    /// One entry per variable; empty unless optimal.
    pub values: Vec<f64>,
    pub iterations: usize,
    /// Branch-and-bound nodes explored (1 for a pure LP).
    pub nodes: usize,
}

impl SolveResult {
    pub(crate) fn without_solution(status: SolveStatus, iterations: usize, nodes: usize) -> Self {
        Self { status, objective: f64::NAN, values: Vec::new(), iterations, nodes }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn value(&self, var: VariableId) -> f64 {
        self.values[var.0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_validated() {
        let mut lp = LinearProgram::new();
        assert!(lp.add_continuous("x", 0.0, 1.0).is_ok());
        assert!(matches!(lp.add_continuous("x", 0.0, 1.0), Err(LpError::DuplicateName(_))));
        assert!(matches!(lp.add_continuous("1x", 0.0, 1.0), Err(LpError::InvalidName(_))));
        assert!(matches!(lp.add_continuous("a-b", 0.0, 1.0), Err(LpError::InvalidName(_))));
        assert!(matches!(lp.add_continuous("y".repeat(256), 0.0, 1.0), Err(LpError::InvalidName(_))));
    }

    #[test]
    fn bounds_and_terms_are_validated() {
        let mut lp = LinearProgram::new();
        assert!(lp.add_continuous("a", 2.0, 1.0).is_err());
        assert!(lp.add_continuous("b", f64::NEG_INFINITY, 1.0).is_err());
        assert!(lp.add_variable("c", 0.0, 2.0, VariableKind::Binary).is_err());
        let x = lp.add_continuous("x", 0.0, f64::INFINITY).unwrap();
        let err = lp.add_constraint("r", vec![(x, 1.0), (x, 2.0)], ConstraintSense::LessEqual, 1.0);
        assert!(matches!(err, Err(LpError::DuplicateTerm { .. })));
        let err = lp.add_constraint("r", vec![(VariableId(9), 1.0)], ConstraintSense::LessEqual, 1.0);
        assert!(matches!(err, Err(LpError::UnknownVariable { .. })));
        let err = lp.add_constraint("r", vec![(x, f64::NAN)], ConstraintSense::LessEqual, 1.0);
        assert!(matches!(err, Err(LpError::NonFinite { .. })));
    }

    #[test]
    fn fingerprint_ignores_objective() {
        let mut lp = LinearProgram::new();
        let x = lp.add_continuous("x", 0.0, 3.0).unwrap();
        lp.add_constraint("c", vec![(x, 1.0)], ConstraintSense::GreaterEqual, 1.0).unwrap();
        let before = lp.matrix_fingerprint();
        lp.set_objective(x, 5.0).unwrap();
        assert_eq!(before, lp.matrix_fingerprint());
        lp.set_bounds(x, 0.0, 4.0).unwrap();
        assert_ne!(before, lp.matrix_fingerprint());
    }
}
