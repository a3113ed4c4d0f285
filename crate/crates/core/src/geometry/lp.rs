//! Dense two-phase simplex for the small feasibility problems behind polytope
//! membership tests (convex-combination variables, a handful of rows).
//!
//! Bland's rule is used throughout, so the solver cannot cycle; problems here
//! have at most a few dozen variables, making the dense tableau the simplest
//! correct choice.

/// Residual tolerance for feasibility decisions.
pub const FEAS_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-11;
const MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

#[derive(Debug, thiserror::Error)]
#[error("simplex iteration cap exceeded")]
pub struct LpStalled;

struct Tableau {
    rows: usize,
    cols: usize, // structural + artificial + rhs
    data: Vec<f64>,
    cost: Vec<f64>, // reduced-cost row, length cols
    basis: Vec<usize>,
    n_structural: usize,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    fn pivot(&mut self, prow: usize, pcol: usize) {
        let cols = self.cols;
        let d = self.data[prow * cols + pcol];
        for j in 0..cols {
            self.data[prow * cols + j] /= d;
        }
        for r in 0..self.rows {
            if r == prow {
                continue;
            }
            let f = self.data[r * cols + pcol];
            if f == 0.0 {
                continue;
            }
            for j in 0..cols {
                let v = self.data[prow * cols + j];
                self.data[r * cols + j] -= f * v;
            }
        }
        let f = self.cost[pcol];
        if f != 0.0 {
            for j in 0..cols {
                self.cost[j] -= f * self.data[prow * cols + j];
            }
        }
        self.basis[prow] = pcol;
    }

    /// Run simplex on the current cost row. `allowed` limits entering columns.
    fn run(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<bool, LpStalled> {
        for _ in 0..MAX_ITERS {
            // Bland: smallest index with negative reduced cost.
            let mut enter = None;
            for j in 0..self.cols - 1 {
                if allowed(j) && self.cost[j] < -FEAS_TOL {
                    enter = Some(j);
                    break;
                }
            }
            let Some(pcol) = enter else {
                return Ok(true); // optimal
            };
            let rhs_col = self.cols - 1;
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pcol);
                if a > PIVOT_TOL {
                    let ratio = self.at(r, rhs_col) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - PIVOT_TOL
                                || (ratio <= lratio + PIVOT_TOL && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((prow, _)) => self.pivot(prow, pcol),
                None => return Ok(false), // unbounded along pcol
            }
        }
        Err(LpStalled)
    }
}

/// Minimise c·x subject to A x = b, x ≥ 0 (rows of `a` are the constraints).
pub fn solve_lp(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpOutcome, LpStalled> {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m);
    let cols = n + m + 1;
    let mut data = vec![0.0; m * cols];
    for (i, row) in a.iter().enumerate() {
        assert_eq!(row.len(), n);
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            data[i * cols + j] = flip * row[j];
        }
        data[i * cols + n + i] = 1.0;
        data[i * cols + cols - 1] = flip * b[i];
    }
    let mut t = Tableau {
        rows: m,
        cols,
        data,
        cost: vec![0.0; cols],
        basis: (n..n + m).collect(),
        n_structural: n,
    };
    // Phase-1 reduced costs: minimise the sum of artificials.
    for j in 0..cols {
        let mut acc = 0.0;
        for i in 0..m {
            acc += t.at(i, j);
        }
        let direct = if (t.n_structural..t.n_structural + m).contains(&j) {
            1.0
        } else {
            0.0
        };
        t.cost[j] = direct - acc;
    }
    // Artificial columns start basic with zero reduced cost.
    for i in 0..m {
        t.cost[n + i] = 0.0;
    }
    t.run(&|_| true)?;
    let phase1_obj = -t.cost[cols - 1];
    let scale = b.iter().fold(1.0_f64, |mx, v| mx.max(v.abs()));
    if phase1_obj > FEAS_TOL * scale.max(1.0) {
        return Ok(LpOutcome::Infeasible);
    }
    // Kick lingering artificials out of the basis where possible.
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| t.at(r, j).abs() > 1e-9) {
                t.pivot(r, j);
            }
        }
    }
    // Phase 2 with the real objective.
    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(c);
    // Reduce against the current basis.
    for r in 0..m {
        let bj = t.basis[r];
        let f = cost[bj];
        if f != 0.0 {
            for j in 0..cols {
                cost[j] -= f * t.at(r, j);
            }
        }
    }
    t.cost = cost;
    let optimal = t.run(&|j| j < n)?;
    if !optimal {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for r in 0..m {
        if t.basis[r] < n {
            x[t.basis[r]] = t.at(r, cols - 1);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpOutcome::Optimal { x, objective })
}

/// Is {x ≥ 0 : A x = b} non-empty?
pub fn feasible_eq(a: &[Vec<f64>], b: &[f64]) -> Result<bool, LpStalled> {
    let n = a.first().map_or(0, |r| r.len());
    Ok(!matches!(
        solve_lp(a, b, &vec![0.0; n])?,
        LpOutcome::Infeasible
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimal_corner_found() {
        // min -x - y  s.t.  x + y + s = 4, x + 3y + t = 6
        let a = vec![vec![1.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]];
        // Corners: (0,2) → 2, (3,1) → 4, (4,0) → 4; optimum −4.
        let out = solve_lp(&a, &[4.0, 6.0], &[-1.0, -1.0, 0.0, 0.0]).unwrap();
        match out {
            LpOutcome::Optimal { objective, .. } => assert!((objective + 4.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_detected() {
        // x = -1, x >= 0
        let a = vec![vec![1.0]];
        let out = solve_lp(&a, &[-1.0], &[0.0]).unwrap();
        assert_eq!(out, LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        // min -x s.t. x - s = 1 (x can grow without bound)
        let a = vec![vec![1.0, -1.0]];
        let out = solve_lp(&a, &[1.0], &[-1.0, 0.0]).unwrap();
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn convex_combination_feasibility() {
        // Is (0.25, 0.25) in the triangle (0,0),(1,0),(0,1)?
        let verts: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let p = [0.25, 0.25];
        let mut rows = vec![vec![0.0; 3]; 3];
        for (j, v) in verts.iter().enumerate() {
            rows[0][j] = v[0];
            rows[1][j] = v[1];
            rows[2][j] = 1.0;
        }
        assert!(feasible_eq(&rows, &[p[0], p[1], 1.0]).unwrap());
        assert!(!feasible_eq(&rows, &[0.6, 0.6, 1.0]).unwrap());
    }
}
