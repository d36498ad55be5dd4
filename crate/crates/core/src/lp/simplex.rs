//! Bounded-variable primal simplex.
//!
//! Every row `i` gets a logical variable `w_i` with column `-e_i`, so the
//! working system is `A x - w = 0` with the row limits moved onto the
//! bounds of `w`. Equality rows therefore carry a fixed logical, which is
//! the artificial that phase 1 drives onto its bound. Phase 1 minimises the
//! sum of bound infeasibilities of the basic variables; phase 2 minimises
//! the (scaled, normalised) objective.
//!
//! Pricing is Dantzig's most-negative reduced cost. After a run of
//! degenerate pivots the method falls back to Bland's smallest-index rule
//! until the objective moves again.
//!
//! After bound changes, [`Simplex::reoptimize`] first runs a dual simplex
//! from the previous basis and then hands over to the primal method, which
//! alone decides the final status.

use super::lu::{ColumnRef, LuFactors};
use super::{ConstraintSense, LinearProgram, LpError, SolveResult, SolveStatus, SolverTolerances, VariableKind};

const NONBASIC: usize = usize::MAX;
const PIVOT_TOLERANCE: f64 = 1e-9;
const REFACTOR_INTERVAL: usize = 100;
const DEGENERATE_STEP: f64 = 1e-12;
const BLAND_AFTER: usize = 50;
const DUAL_PIVOT_TOLERANCE: f64 = 1e-7;
static NEG_ONE: [f64; 1] = [-1.0];

/// Solve a program without binary variables.
pub fn solve_lp(program: &LinearProgram) -> Result<SolveResult, LpError> {
    solve_lp_with(program, &SolverTolerances::default())
}

pub fn solve_lp_with(program: &LinearProgram, tol: &SolverTolerances) -> Result<SolveResult, LpError> {
    if program.has_binaries() {
        return Err(LpError::HasBinaries);
    }
    solve_relaxation_with(program, tol)
}

/// Solve the continuous relaxation (binaries treated as `[0, 1]` reals).
pub fn solve_relaxation(program: &LinearProgram) -> Result<SolveResult, LpError> {
    solve_relaxation_with(program, &SolverTolerances::default())
}

pub fn solve_relaxation_with(program: &LinearProgram, tol: &SolverTolerances) -> Result<SolveResult, LpError> {
    let mut simplex = Simplex::new(program, *tol);
    let status = simplex.run()?;
    Ok(simplex.result(program, status, 1))
}

/// Column-compressed, scaled copy of a program.
struct StandardForm {
    m: usize,
    n: usize,
    col_start: Vec<usize>,
    row_idx: Vec<usize>,
    val: Vec<f64>,
    logical_rows: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
}

fn power_of_two(x: f64) -> f64 {
    if x.is_finite() && x > 0.0 {
        2f64.powi(x.log2().round() as i32)
    } else {
        1.0
    }
}

impl StandardForm {
    fn build(program: &LinearProgram) -> Self {
        let m = program.num_constraints();
        let n = program.num_variables();
        let mut counts = vec![0usize; n];
        for c in program.constraints() {
            for (v, _) in &c.terms {
                counts[v.0] += 1;
            }
        }
        let mut col_start = vec![0usize; n + 1];
        for j in 0..n {
            col_start[j + 1] = col_start[j] + counts[j];
        }
        let nnz = col_start[n];
        let mut row_idx = vec![0usize; nnz];
        let mut val = vec![0.0; nnz];
        let mut fill = col_start.clone();
        for (i, c) in program.constraints().iter().enumerate() {
            for &(v, a) in &c.terms {
                if a != 0.0 {
                    row_idx[fill[v.0]] = i;
                    val[fill[v.0]] = a;
                    fill[v.0] += 1;
                }
            }
        }
        // Drop explicit zeros by compacting each column.
        let mut write = 0;
        let mut new_start = vec![0usize; n + 1];
        for j in 0..n {
            for k in col_start[j]..fill[j] {
                row_idx[write] = row_idx[k];
                val[write] = val[k];
                write += 1;
            }
            new_start[j + 1] = write;
        }
        row_idx.truncate(write);
        val.truncate(write);
        let col_start = new_start;

        let (row_scale, col_scale) = geometric_scaling(m, n, &col_start, &row_idx, &val);
        for j in 0..n {
            for k in col_start[j]..col_start[j + 1] {
                val[k] *= row_scale[row_idx[k]] * col_scale[j];
            }
        }

        let mut lower = Vec::with_capacity(n + m);
        let mut upper = Vec::with_capacity(n + m);
        let mut cost = Vec::with_capacity(n + m);
        for (j, v) in program.variables().iter().enumerate() {
            lower.push(v.lower / col_scale[j]);
            upper.push(v.upper / col_scale[j]);
            cost.push(program.objective()[j] * col_scale[j]);
        }
        for (i, c) in program.constraints().iter().enumerate() {
            let r = c.rhs * row_scale[i];
            let (lo, hi) = match c.sense {
                ConstraintSense::LessEqual => (f64::NEG_INFINITY, r),
                ConstraintSense::GreaterEqual => (r, f64::INFINITY),
                ConstraintSense::Equal => (r, r),
            };
            lower.push(lo);
            upper.push(hi);
            cost.push(0.0);
        }
        let cmax = cost.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        if cmax > 0.0 {
            let s = power_of_two(1.0 / cmax);
            for c in &mut cost {
                *c *= s;
            }
        }
        StandardForm { m, n, col_start, row_idx, val, logical_rows: (0..m).collect(), lower, upper, cost, row_scale, col_scale }
    }

    fn column(&self, j: usize) -> ColumnRef<'_> {
        if j < self.n {
            let r = self.col_start[j]..self.col_start[j + 1];
            ColumnRef { rows: &self.row_idx[r.clone()], values: &self.val[r] }
        } else {
            let i = j - self.n;
            ColumnRef { rows: &self.logical_rows[i..i + 1], values: &NEG_ONE }
        }
    }

    fn dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            (self.col_start[j]..self.col_start[j + 1]).map(|k| self.val[k] * y[self.row_idx[k]]).sum()
        } else {
            -y[j - self.n]
        }
    }
}

/// Iterated geometric-mean scaling, rounded to powers of two.
fn geometric_scaling(m: usize, n: usize, col_start: &[usize], row_idx: &[usize], val: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut rs = vec![1.0; m];
    let mut cs = vec![1.0; n];
    for _ in 0..6 {
        let mut rmin = vec![f64::INFINITY; m];
        let mut rmax = vec![0.0f64; m];
        for j in 0..n {
            for k in col_start[j]..col_start[j + 1] {
                let a = val[k].abs() * cs[j];
                let i = row_idx[k];
                rmin[i] = rmin[i].min(a);
                rmax[i] = rmax[i].max(a);
            }
        }
        for i in 0..m {
            if rmax[i] > 0.0 {
                rs[i] = 1.0 / (rmin[i] * rmax[i]).sqrt();
            }
        }
        for j in 0..n {
            let mut cmin = f64::INFINITY;
            let mut cmax = 0.0f64;
            for k in col_start[j]..col_start[j + 1] {
                let a = val[k].abs() * rs[row_idx[k]];
                cmin = cmin.min(a);
                cmax = cmax.max(a);
            }
            if cmax > 0.0 {
                cs[j] = 1.0 / (cmin * cmax).sqrt();
            }
        }
    }
    // Final pass: bring every row maximum close to one.
    let mut rmax = vec![0.0f64; m];
    for j in 0..n {
        for k in col_start[j]..col_start[j + 1] {
            let i = row_idx[k];
            rmax[i] = rmax[i].max(val[k].abs() * cs[j] * rs[i]);
        }
    }
    for i in 0..m {
        if rmax[i] > 0.0 {
            rs[i] /= rmax[i];
        }
    }
    (rs.into_iter().map(power_of_two).collect(), cs.into_iter().map(power_of_two).collect())
}

pub(crate) struct Simplex {
    sf: StandardForm,
    tol: SolverTolerances,
    x: Vec<f64>,
    basis: Vec<usize>,
    pos_of: Vec<usize>,
    at_upper: Vec<bool>,
    lu: Option<LuFactors>,
    iterations: usize,
    iteration_limit: usize,
    // Scratch buffers.
    row_buf: Vec<f64>,
    pos_buf: Vec<f64>,
    alpha: Vec<f64>,
    y: Vec<f64>,
    rho: Vec<f64>,
}

enum Leaving {
    Flip,
    Row { pos: usize, to_upper: bool, theta: f64 },
    Unbounded,
}

impl Simplex {
    pub fn new(program: &LinearProgram, tol: SolverTolerances) -> Self {
        let sf = StandardForm::build(program);
        let (m, n) = (sf.m, sf.n);
        let mut x = vec![0.0; n + m];
        let mut at_upper = vec![false; n + m];
        for j in 0..n + m {
            if sf.lower[j].is_finite() {
                x[j] = sf.lower[j];
            } else {
                x[j] = sf.upper[j];
                at_upper[j] = true;
            }
        }
        let basis: Vec<usize> = (n..n + m).collect();
        let mut pos_of = vec![NONBASIC; n + m];
        for (p, &j) in basis.iter().enumerate() {
            pos_of[j] = p;
        }
        let iteration_limit = 200 * (n + m) + 10_000;
        Simplex {
            sf,
            tol,
            x,
            basis,
            pos_of,
            at_upper,
            lu: None,
            iterations: 0,
            iteration_limit,
            row_buf: vec![0.0; m],
            pos_buf: vec![0.0; m],
            alpha: vec![0.0; m],
            y: vec![0.0; m],
            rho: vec![0.0; m],
        }
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Change the bounds of structural variable `j` (original units).
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        let s = self.sf.col_scale[j];
        self.sf.lower[j] = lower / s;
        self.sf.upper[j] = upper / s;
        if self.pos_of[j] == NONBASIC {
            if self.at_upper[j] && self.sf.upper[j].is_finite() {
                self.x[j] = self.sf.upper[j];
            } else {
                self.at_upper[j] = false;
                self.x[j] = self.sf.lower[j];
            }
        }
    }

    fn refactor(&mut self) -> Result<(), LpError> {
        for _ in 0..self.sf.m + 1 {
            let sf = &self.sf;
            let basis = &self.basis;
            match LuFactors::factorize(sf.m, |p| sf.column(basis[p])) {
                Ok(lu) => {
                    self.lu = Some(lu);
                    return Ok(());
                }
                Err(sing) => {
                    for (&p, &row) in sing.positions.iter().zip(&sing.rows) {
                        let out = self.basis[p];
                        self.pos_of[out] = NONBASIC;
                        if self.sf.lower[out].is_finite() {
                            self.x[out] = self.sf.lower[out];
                            self.at_upper[out] = false;
                        } else {
                            self.x[out] = self.sf.upper[out];
                            self.at_upper[out] = true;
                        }
                        let logical = self.sf.n + row;
                        self.basis[p] = logical;
                        self.pos_of[logical] = p;
                    }
                }
            }
        }
        Err(LpError::Numerical("basis repair did not converge".into()))
    }

    /// Recompute basic values from the nonbasic ones.
    fn compute_basics(&mut self) {
        let sf = &self.sf;
        let rhs = &mut self.row_buf;
        rhs.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..sf.n + sf.m {
            if self.pos_of[j] != NONBASIC {
                continue;
            }
            let xj = self.x[j];
            if xj == 0.0 {
                continue;
            }
            let col = sf.column(j);
            for (&i, &a) in col.rows.iter().zip(col.values) {
                rhs[i] -= a * xj;
            }
        }
        let lu = self.lu.as_mut().expect("factorised");
        lu.ftran(rhs, &mut self.pos_buf);
        for (p, &j) in self.basis.iter().enumerate() {
            self.x[j] = self.pos_buf[p];
        }
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let (x, lo, hi) = (self.x[j], self.sf.lower[j], self.sf.upper[j]);
        if x < lo - self.tol.feasibility {
            lo - x
        } else if x > hi + self.tol.feasibility {
            x - hi
        } else {
            0.0
        }
    }

    pub fn run(&mut self) -> Result<SolveStatus, LpError> {
        let (m, n) = (self.sf.m, self.sf.n);
        for j in 0..n {
            if self.sf.lower[j] > self.sf.upper[j] {
                return Ok(SolveStatus::Infeasible);
            }
        }
        self.refactor()?;
        self.compute_basics();
        let start = self.iterations;
        let mut degenerate_run = 0usize;
        let mut refreshed = false;
        loop {
            if self.iterations - start >= self.iteration_limit {
                return Err(LpError::IterationLimit(self.iteration_limit));
            }
            if self.lu.as_ref().map_or(true, |lu| lu.num_updates() >= REFACTOR_INTERVAL || lu.etas_dominate()) {
                self.refactor()?;
                self.compute_basics();
            }

            let phase_one = self.basis.iter().any(|&j| self.infeasibility(j) > 0.0);
            for p in 0..m {
                let j = self.basis[p];
                self.pos_buf[p] = if phase_one {
                    let (x, lo, hi) = (self.x[j], self.sf.lower[j], self.sf.upper[j]);
                    if x < lo - self.tol.feasibility {
                        -1.0
                    } else if x > hi + self.tol.feasibility {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    self.sf.cost[j]
                };
            }
            {
                let lu = self.lu.as_mut().expect("factorised");
                lu.btran(&mut self.pos_buf, &mut self.y);
            }

            let bland = degenerate_run >= BLAND_AFTER;
            let mut entering = NONBASIC;
            let mut best = 0.0;
            let mut entering_d = 0.0;
            for j in 0..n + m {
                if self.pos_of[j] != NONBASIC || self.sf.lower[j] == self.sf.upper[j] {
                    continue;
                }
                let c = if phase_one { 0.0 } else { self.sf.cost[j] };
                let d = c - self.sf.dot(j, &self.y);
                let gain = if self.at_upper[j] { d } else { -d };
                if gain > self.tol.optimality {
                    if bland {
                        entering = j;
                        entering_d = d;
                        break;
                    }
                    if gain > best {
                        best = gain;
                        entering = j;
                        entering_d = d;
                    }
                }
            }

            if entering == NONBASIC {
                if phase_one {
                    return Ok(SolveStatus::Infeasible);
                }
                if !refreshed && self.lu.as_ref().map_or(0, |lu| lu.num_updates()) > 0 {
                    // Confirm optimality on a fresh factorisation.
                    refreshed = true;
                    self.refactor()?;
                    self.compute_basics();
                    continue;
                }
                return Ok(SolveStatus::Optimal);
            }
            refreshed = false;

            let dir = if entering_d < 0.0 { 1.0 } else { -1.0 };
            {
                let col = self.sf.column(entering);
                self.row_buf.iter_mut().for_each(|v| *v = 0.0);
                for (&i, &a) in col.rows.iter().zip(col.values) {
                    self.row_buf[i] = a;
                }
                let lu = self.lu.as_mut().expect("factorised");
                lu.ftran(&mut self.row_buf, &mut self.alpha);
            }

            let leaving = self.ratio_test(entering, dir, phase_one, bland);
            self.iterations += 1;
            match leaving {
                Leaving::Unbounded => {
                    if phase_one {
                        return Err(LpError::Numerical("unbounded phase-one direction".into()));
                    }
                    return Ok(SolveStatus::Unbounded);
                }
                Leaving::Flip => {
                    let theta = self.sf.upper[entering] - self.sf.lower[entering];
                    self.step(entering, dir, theta);
                    self.at_upper[entering] = dir > 0.0;
                    self.x[entering] = if dir > 0.0 { self.sf.upper[entering] } else { self.sf.lower[entering] };
                    degenerate_run = 0;
                }
                Leaving::Row { pos, to_upper, theta } => {
                    self.step(entering, dir, theta);
                    let out = self.basis[pos];
                    self.x[out] = if to_upper { self.sf.upper[out] } else { self.sf.lower[out] };
                    self.at_upper[out] = to_upper;
                    self.pos_of[out] = NONBASIC;
                    self.basis[pos] = entering;
                    self.pos_of[entering] = pos;
                    let lu = self.lu.as_mut().expect("factorised");
                    lu.update(pos, &self.alpha);
                    if theta <= DEGENERATE_STEP {
                        degenerate_run += 1;
                    } else {
                        degenerate_run = 0;
                    }
                }
            }
        }
    }

    /// Re-solve after bound changes, warm-started from the current basis.
    pub fn reoptimize(&mut self) -> Result<SolveStatus, LpError> {
        if self.lu.is_some() && (0..self.sf.n).all(|j| self.sf.lower[j] <= self.sf.upper[j]) {
            self.dual()?;
        }
        self.run()
    }

    fn reduced_cost(&self, j: usize) -> f64 {
        self.sf.cost[j] - self.sf.dot(j, &self.y)
    }

    fn compute_duals(&mut self) {
        for p in 0..self.sf.m {
            self.pos_buf[p] = self.sf.cost[self.basis[p]];
        }
        let lu = self.lu.as_mut().expect("factorised");
        lu.btran(&mut self.pos_buf, &mut self.y);
    }

    /// Bounded dual simplex. Returns whether it reached a primal feasible
    /// basis; on `false` the basis is still valid, just not final.
    fn dual(&mut self) -> Result<bool, LpError> {
        let (m, n) = (self.sf.m, self.sf.n);
        let opt = self.tol.optimality;
        self.refactor()?;
        self.compute_duals();
        // Boxed nonbasics move to the bound their reduced cost favours.
        for j in 0..n + m {
            if self.pos_of[j] != NONBASIC || self.sf.lower[j] == self.sf.upper[j] {
                continue;
            }
            let d = self.reduced_cost(j);
            if d < -opt && !self.at_upper[j] {
                if !self.sf.upper[j].is_finite() {
                    return Ok(false);
                }
                self.at_upper[j] = true;
                self.x[j] = self.sf.upper[j];
            } else if d > opt && self.at_upper[j] {
                if !self.sf.lower[j].is_finite() {
                    return Ok(false);
                }
                self.at_upper[j] = false;
                self.x[j] = self.sf.lower[j];
            }
        }
        self.compute_basics();
        let limit = self.iterations + 10 * m + 1000;
        loop {
            if self.iterations >= limit {
                return Ok(false);
            }
            if self.lu.as_ref().is_some_and(|lu| lu.num_updates() >= REFACTOR_INTERVAL || lu.etas_dominate()) {
                self.refactor()?;
                self.compute_basics();
            }
            let mut leave = None;
            let mut worst = 0.0;
            for p in 0..m {
                let inf = self.infeasibility(self.basis[p]);
                if inf > worst {
                    worst = inf;
                    leave = Some(p);
                }
            }
            let Some(p) = leave else { return Ok(true) };
            let out = self.basis[p];
            let to_lower = self.x[out] < self.sf.lower[out];

            self.compute_duals();
            self.pos_buf.iter_mut().for_each(|v| *v = 0.0);
            self.pos_buf[p] = 1.0;
            {
                let lu = self.lu.as_mut().expect("factorised");
                lu.btran(&mut self.pos_buf, &mut self.rho);
            }

            // Harris two-pass dual ratio test; candidates are nonbasics whose
            // allowed move pushes the leaving variable towards its bound.
            let mut cands: Vec<(usize, f64, f64)> = Vec::new();
            for j in 0..n + m {
                if self.pos_of[j] != NONBASIC || self.sf.lower[j] == self.sf.upper[j] {
                    continue;
                }
                let a = self.sf.dot(j, &self.rho);
                if a.abs() < DUAL_PIVOT_TOLERANCE {
                    continue;
                }
                let helps = if to_lower { (a < 0.0) != self.at_upper[j] } else { (a > 0.0) != self.at_upper[j] };
                if !helps {
                    continue;
                }
                let d = self.reduced_cost(j);
                let slack = if self.at_upper[j] { (-d).max(0.0) } else { d.max(0.0) };
                cands.push((j, slack, a.abs()));
            }
            if cands.is_empty() {
                return Ok(false);
            }
            let bound = cands.iter().map(|c| (c.1 + opt) / c.2).fold(f64::INFINITY, f64::min);
            let mut pick: Option<(usize, f64, f64)> = None;
            for &c in &cands {
                if c.1 / c.2 <= bound && pick.is_none_or(|q| c.2 > q.2) {
                    pick = Some(c);
                }
            }
            let q = pick.expect("nonempty").0;

            {
                let col = self.sf.column(q);
                self.row_buf.iter_mut().for_each(|v| *v = 0.0);
                for (&i, &a) in col.rows.iter().zip(col.values) {
                    self.row_buf[i] = a;
                }
                let lu = self.lu.as_mut().expect("factorised");
                lu.ftran(&mut self.row_buf, &mut self.alpha);
            }
            if self.alpha[p].abs() < DUAL_PIVOT_TOLERANCE {
                return Ok(false);
            }
            let target = if to_lower { self.sf.lower[out] } else { self.sf.upper[out] };
            let theta = (self.x[out] - target) / self.alpha[p];
            self.step(q, 1.0, theta);
            self.x[out] = target;
            self.at_upper[out] = !to_lower;
            self.pos_of[out] = NONBASIC;
            self.basis[p] = q;
            self.pos_of[q] = p;
            let lu = self.lu.as_mut().expect("factorised");
            lu.update(p, &self.alpha);
            self.iterations += 1;
        }
    }

    fn step(&mut self, entering: usize, dir: f64, theta: f64) {
        if theta == 0.0 {
            return;
        }
        self.x[entering] += dir * theta;
        for (p, &j) in self.basis.iter().enumerate() {
            let a = self.alpha[p];
            if a != 0.0 {
                self.x[j] -= dir * a * theta;
            }
        }
    }

    /// Bounded ratio test. Harris two-pass selection in normal mode; the
    /// smallest ratio with smallest variable index under Bland's rule.
    fn ratio_test(&self, entering: usize, dir: f64, phase_one: bool, bland: bool) -> Leaving {
        let feas = self.tol.feasibility;
        let flip = self.sf.upper[entering] - self.sf.lower[entering];
        // (pos, exact ratio, |rate|, to_upper, relaxed ratio)
        let mut cands: Vec<(usize, f64, f64, bool, f64)> = Vec::new();
        for p in 0..self.sf.m {
            let rate = -dir * self.alpha[p];
            if rate.abs() < PIVOT_TOLERANCE {
                continue;
            }
            let j = self.basis[p];
            let (x, lo, hi) = (self.x[j], self.sf.lower[j], self.sf.upper[j]);
            let below = x < lo - feas;
            let above = x > hi + feas;
            let entry = if phase_one && below {
                if rate > 0.0 {
                    Some(((lo - x) / rate, false, (lo - x + feas) / rate))
                } else {
                    None
                }
            } else if phase_one && above {
                if rate < 0.0 {
                    Some(((x - hi) / -rate, true, (x - hi + feas) / -rate))
                } else {
                    None
                }
            } else if rate < 0.0 {
                lo.is_finite().then(|| (((x - lo) / -rate).max(0.0), false, (x - lo + feas) / -rate))
            } else {
                hi.is_finite().then(|| (((hi - x) / rate).max(0.0), true, (hi - x + feas) / rate))
            };
            if let Some((exact, to_upper, relaxed)) = entry {
                cands.push((p, exact, rate.abs(), to_upper, relaxed));
            }
        }
        if cands.is_empty() {
            return if flip.is_finite() { Leaving::Flip } else { Leaving::Unbounded };
        }
        let chosen = if bland {
            let min = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            cands
                .iter()
                .filter(|c| c.1 <= min + DEGENERATE_STEP)
                .min_by_key(|c| self.basis[c.0])
                .copied()
                .expect("nonempty")
        } else {
            let bound = cands.iter().map(|c| c.4).fold(f64::INFINITY, f64::min);
            let mut pick = cands[0];
            let mut have = false;
            for &c in &cands {
                if c.1 <= bound && (!have || c.2 > pick.2) {
                    pick = c;
                    have = true;
                }
            }
            pick
        };
        if flip.is_finite() && flip <= chosen.1 {
            return Leaving::Flip;
        }
        Leaving::Row { pos: chosen.0, to_upper: chosen.3, theta: chosen.1 }
    }

    /// Structural values in original units. Scale factors are powers of two,
    /// so nonbasic variables land exactly on their bounds; basic values
    /// within tolerance of a bound are clamped onto it.
    pub fn values(&self) -> Vec<f64> {
        (0..self.sf.n)
            .map(|j| {
                let s = self.sf.col_scale[j];
                let (lo, hi) = (self.sf.lower[j] * s, self.sf.upper[j] * s);
                let x = self.x[j] * s;
                if self.pos_of[j] == NONBASIC {
                    return x;
                }
                let slack = self.tol.feasibility * s.max(1.0);
                if x < lo && x >= lo - slack {
                    lo
                } else if x > hi && x <= hi + slack {
                    hi
                } else {
                    x
                }
            })
            .collect()
    }

    pub fn result(&self, program: &LinearProgram, status: SolveStatus, nodes: usize) -> SolveResult {
        if status != SolveStatus::Optimal {
            return SolveResult::without_solution(status, self.iterations, nodes);
        }
        let mut values = self.values();
        for (v, var) in values.iter_mut().zip(program.variables()) {
            if var.kind == VariableKind::Binary && (*v - v.round()).abs() <= self.tol.integrality {
                *v = v.round();
            }
        }
        let objective = program.objective_value(&values);
        SolveResult { status, objective, values, iterations: self.iterations, nodes }
    }

    /// Row scale applied to constraint `i`.
    #[allow(dead_code)]
    pub fn row_scale(&self, i: usize) -> f64 {
        self.sf.row_scale[i]
    }
}
