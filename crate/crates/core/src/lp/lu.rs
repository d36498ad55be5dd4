//! Sparse LU factorisation of the simplex basis with product-form updates.
//!
//! Left-looking (Gilbert–Peierls) elimination with threshold partial
//! pivoting. Columns are processed in order of increasing fill count; among
//! acceptable pivots the row with the fewest basis entries wins.

const UNPIVOTED: usize = usize::MAX;
const PIVOT_THRESHOLD: f64 = 0.1;
const SINGULAR_TOLERANCE: f64 = 1e-11;

/// Borrowed sparse column.
pub(crate) struct ColumnRef<'a> {
    pub rows: &'a [usize],
    pub values: &'a [f64],
}

struct Eta {
    pos: usize,
    pivot: f64,
    idx: Vec<usize>,
    val: Vec<f64>,
}

pub(crate) struct Singular {
    /// Basis positions whose columns could not be pivoted.
    pub positions: Vec<usize>,
    /// Rows left without a pivot, same length as `positions`.
    pub rows: Vec<usize>,
}

pub(crate) struct LuFactors {
    m: usize,
    pivot_row: Vec<usize>,
    step_of_row: Vec<usize>,
    step_pos: Vec<usize>,
    l_start: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    u_start: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<f64>,
    u_diag: Vec<f64>,
    etas: Vec<Eta>,
    eta_nnz: usize,
    work: Vec<f64>,
}

impl LuFactors {
    /// Factorise the `m × m` matrix whose column at basis position `p` is `column(p)`.
    pub fn factorize<'a, F>(m: usize, column: F) -> Result<Self, Singular>
    where
        F: Fn(usize) -> ColumnRef<'a>,
    {
        let mut row_count = vec![0usize; m];
        let mut col_nnz = vec![0usize; m];
        for (p, nnz) in col_nnz.iter_mut().enumerate() {
            let c = column(p);
            *nnz = c.rows.len();
            for &r in c.rows {
                row_count[r] += 1;
            }
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&p| (col_nnz[p], p));

        let mut f = LuFactors {
            m,
            pivot_row: Vec::with_capacity(m),
            step_of_row: vec![UNPIVOTED; m],
            step_pos: Vec::with_capacity(m),
            l_start: vec![0],
            l_idx: Vec::new(),
            l_val: Vec::new(),
            u_start: vec![0],
            u_idx: Vec::new(),
            u_val: Vec::new(),
            u_diag: Vec::with_capacity(m),
            etas: Vec::new(),
            eta_nnz: 0,
            work: vec![0.0; m],
        };

        let mut x = vec![0.0; m];
        let mut mark = vec![false; m];
        let mut visited: Vec<usize> = Vec::new();
        let mut topo: Vec<usize> = Vec::new();
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let mut candidates: Vec<usize> = Vec::new();
        let mut singular_pos = Vec::new();

        for &p in &order {
            let col = column(p);
            // Symbolic reach of the column pattern through L.
            topo.clear();
            visited.clear();
            for &root in col.rows {
                if mark[root] {
                    continue;
                }
                mark[root] = true;
                visited.push(root);
                stack.push((root, 0));
                while let Some(top) = stack.last_mut() {
                    let (node, child) = *top;
                    let s = f.step_of_row[node];
                    let children = if s == UNPIVOTED { &f.l_idx[0..0] } else { &f.l_idx[f.l_start[s]..f.l_start[s + 1]] };
                    if child < children.len() {
                        top.1 += 1;
                        let next = children[child];
                        if !mark[next] {
                            mark[next] = true;
                            visited.push(next);
                            stack.push((next, 0));
                        }
                    } else {
                        stack.pop();
                        topo.push(node);
                    }
                }
            }
            for (&r, &v) in col.rows.iter().zip(col.values) {
                x[r] = v;
            }
            // Numeric elimination in topological order.
            for &node in topo.iter().rev() {
                let s = f.step_of_row[node];
                if s == UNPIVOTED {
                    continue;
                }
                let xv = x[node];
                if xv != 0.0 {
                    for k in f.l_start[s]..f.l_start[s + 1] {
                        x[f.l_idx[k]] -= f.l_val[k] * xv;
                    }
                }
            }
            candidates.clear();
            let mut max_abs: f64 = 0.0;
            for &node in topo.iter().rev() {
                if f.step_of_row[node] == UNPIVOTED {
                    candidates.push(node);
                    max_abs = max_abs.max(x[node].abs());
                }
            }
            let mut pivot = UNPIVOTED;
            if max_abs > SINGULAR_TOLERANCE {
                let mut best = (usize::MAX, 0.0f64, usize::MAX);
                for &r in &candidates {
                    let a = x[r].abs();
                    if a >= PIVOT_THRESHOLD * max_abs {
                        let key = (row_count[r], a, r);
                        if key.0 < best.0 || (key.0 == best.0 && (key.1 > best.1 || (key.1 == best.1 && key.2 < best.2))) {
                            best = key;
                        }
                    }
                }
                pivot = best.2;
            }
            if pivot == UNPIVOTED {
                singular_pos.push(p);
            } else {
                let step = f.pivot_row.len();
                let diag = x[pivot];
                for &node in topo.iter().rev() {
                    let s = f.step_of_row[node];
                    if s != UNPIVOTED && x[node] != 0.0 {
                        f.u_idx.push(s);
                        f.u_val.push(x[node]);
                    }
                }
                f.u_start.push(f.u_idx.len());
                f.u_diag.push(diag);
                for &r in &candidates {
                    if r != pivot && x[r] != 0.0 {
                        f.l_idx.push(r);
                        f.l_val.push(x[r] / diag);
                    }
                }
                f.l_start.push(f.l_idx.len());
                f.pivot_row.push(pivot);
                f.step_of_row[pivot] = step;
                f.step_pos.push(p);
            }
            for &node in &visited {
                x[node] = 0.0;
                mark[node] = false;
            }
        }

        if !singular_pos.is_empty() {
            let rows = (0..m).filter(|&r| f.step_of_row[r] == UNPIVOTED).collect();
            return Err(Singular { positions: singular_pos, rows });
        }
        Ok(f)
    }

    pub fn num_updates(&self) -> usize {
        self.etas.len()
    }

    /// Whether the update file has outgrown the factors themselves.
    pub fn etas_dominate(&self) -> bool {
        self.eta_nnz > 2 * (self.l_idx.len() + self.u_idx.len() + self.m)
    }

    /// Solve `B x = rhs`. `rhs` is indexed by row and is destroyed; the
    /// result is written to `out`, indexed by basis position.
    pub fn ftran(&mut self, rhs: &mut [f64], out: &mut [f64]) {
        let m = self.m;
        for s in 0..m {
            let v = rhs[self.pivot_row[s]];
            if v != 0.0 {
                for k in self.l_start[s]..self.l_start[s + 1] {
                    rhs[self.l_idx[k]] -= self.l_val[k] * v;
                }
            }
        }
        let w = &mut self.work;
        for s in 0..m {
            w[s] = rhs[self.pivot_row[s]];
        }
        for k in (0..m).rev() {
            let wk = w[k] / self.u_diag[k];
            w[k] = wk;
            if wk != 0.0 {
                for e in self.u_start[k]..self.u_start[k + 1] {
                    w[self.u_idx[e]] -= self.u_val[e] * wk;
                }
            }
        }
        for k in 0..m {
            out[self.step_pos[k]] = w[k];
        }
        for eta in &self.etas {
            let xr = out[eta.pos] / eta.pivot;
            out[eta.pos] = xr;
            if xr != 0.0 {
                for (&i, &a) in eta.idx.iter().zip(&eta.val) {
                    out[i] -= a * xr;
                }
            }
        }
    }

    /// Solve `Bᵀ y = rhs`. `rhs` is indexed by basis position and is
    /// destroyed; the result is written to `out`, indexed by row.
    pub fn btran(&mut self, rhs: &mut [f64], out: &mut [f64]) {
        let m = self.m;
        for eta in self.etas.iter().rev() {
            let mut acc = rhs[eta.pos];
            for (&i, &a) in eta.idx.iter().zip(&eta.val) {
                acc -= a * rhs[i];
            }
            rhs[eta.pos] = acc / eta.pivot;
        }
        let w = &mut self.work;
        for k in 0..m {
            let mut acc = rhs[self.step_pos[k]];
            for e in self.u_start[k]..self.u_start[k + 1] {
                acc -= self.u_val[e] * w[self.u_idx[e]];
            }
            w[k] = acc / self.u_diag[k];
        }
        for s in 0..m {
            out[self.pivot_row[s]] = w[s];
        }
        for s in (0..m).rev() {
            let mut acc = out[self.pivot_row[s]];
            for k in self.l_start[s]..self.l_start[s + 1] {
                acc -= self.l_val[k] * out[self.l_idx[k]];
            }
            out[self.pivot_row[s]] = acc;
        }
    }

    /// Record the replacement of the column at `pos` by a column whose
    /// FTRAN image is `alpha` (dense, indexed by position).
    pub fn update(&mut self, pos: usize, alpha: &[f64]) {
        let mut idx = Vec::new();
        let mut val = Vec::new();
        for (i, &a) in alpha.iter().enumerate() {
            if i != pos && a != 0.0 {
                idx.push(i);
                val.push(a);
            }
        }
        self.eta_nnz += idx.len();
        self.etas.push(Eta { pos, pivot: alpha[pos], idx, val });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dense {
        cols: Vec<(Vec<usize>, Vec<f64>)>,
    }

    impl Dense {
        fn new(rows: &[&[f64]]) -> Self {
            let m = rows.len();
            let cols = (0..m)
                .map(|j| {
                    let mut idx = Vec::new();
                    let mut val = Vec::new();
                    for (i, row) in rows.iter().enumerate() {
                        if row[j] != 0.0 {
                            idx.push(i);
                            val.push(row[j]);
                        }
                    }
                    (idx, val)
                })
                .collect();
            Self { cols }
        }

        fn factor(&self) -> Result<LuFactors, Singular> {
            LuFactors::factorize(self.cols.len(), |p| ColumnRef { rows: &self.cols[p].0, values: &self.cols[p].1 })
        }

        fn mul(&self, x: &[f64]) -> Vec<f64> {
            let mut y = vec![0.0; self.cols.len()];
            for (j, (idx, val)) in self.cols.iter().enumerate() {
                for (&i, &a) in idx.iter().zip(val) {
                    y[i] += a * x[j];
                }
            }
            y
        }

        fn mul_t(&self, y: &[f64]) -> Vec<f64> {
            self.cols.iter().map(|(idx, val)| idx.iter().zip(val).map(|(&i, &a)| a * y[i]).sum()).collect()
        }
    }

    #[test]
    fn solves_both_directions() {
        let b = Dense::new(&[&[2.0, 0.0, 1.0, 0.0], &[1.0, 3.0, 0.0, 0.0], &[0.0, 1.0, 4.0, 1.0], &[0.0, 0.0, 1.0, 5.0]]);
        let mut lu = b.factor().ok().unwrap();
        let rhs = vec![1.0, -2.0, 3.0, 0.5];
        let mut work = rhs.clone();
        let mut x = vec![0.0; 4];
        lu.ftran(&mut work, &mut x);
        let back = b.mul(&x);
        for (a, e) in back.iter().zip(&rhs) {
            assert!((a - e).abs() < 1e-12);
        }
        let mut work = rhs.clone();
        let mut y = vec![0.0; 4];
        lu.btran(&mut work, &mut y);
        let back = b.mul_t(&y);
        for (a, e) in back.iter().zip(&rhs) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_update_tracks_column_replacement() {
        let b = Dense::new(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let mut lu = b.factor().ok().unwrap();
        // Replace column 1 with (1, 2, 3).
        let newcol = vec![1.0, 2.0, 3.0];
        let mut work = newcol.clone();
        let mut alpha = vec![0.0; 3];
        lu.ftran(&mut work, &mut alpha);
        lu.update(1, &alpha);
        let replaced = Dense::new(&[&[1.0, 1.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 3.0, 1.0]]);
        let rhs = vec![4.0, 5.0, 6.0];
        let mut work = rhs.clone();
        let mut x = vec![0.0; 3];
        lu.ftran(&mut work, &mut x);
        let back = replaced.mul(&x);
        for (a, e) in back.iter().zip(&rhs) {
            assert!((a - e).abs() < 1e-12);
        }
        let mut work = rhs.clone();
        let mut y = vec![0.0; 3];
        lu.btran(&mut work, &mut y);
        let back = replaced.mul_t(&y);
        for (a, e) in back.iter().zip(&rhs) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn reports_singular_columns() {
        let b = Dense::new(&[&[1.0, 2.0, 0.0], &[2.0, 4.0, 0.0], &[0.0, 0.0, 1.0]]);
        let err = b.factor().err().unwrap();
        assert_eq!(err.positions.len(), 1);
        assert_eq!(err.rows.len(), 1);
    }
}
