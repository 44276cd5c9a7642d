//! Dense two-phase simplex for small standard-form linear programs:
//! minimize c·x subject to A·x = b, x ≥ 0.
//!
//! Every LP in this crate has at most a few dozen rows, so a plain tableau
//! with Bland's rule (cycle-proof) is the right tool.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("linear program is infeasible (phase-1 residual {residual:.3e})")]
    Infeasible { residual: f64 },
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("pivot limit {limit} exceeded")]
    PivotLimit { limit: usize },
    #[error("malformed program: {0}")]
    Shape(String),
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-10;

struct Tableau {
    rows: usize,
    cols: usize, // variable columns, rhs stored separately
    t: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
    cost_rhs: f64,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.t[row][col];
        for j in 0..self.cols {
            self.t[row][j] /= piv;
        }
        self.rhs[row] /= piv;
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let f = self.t[i][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..self.cols {
                self.t[i][j] -= f * self.t[row][j];
            }
            self.rhs[i] -= f * self.rhs[row];
            self.t[i][col] = 0.0;
        }
        let f = self.cost[col];
        if f != 0.0 {
            for j in 0..self.cols {
                self.cost[j] -= f * self.t[row][j];
            }
            self.cost_rhs -= f * self.rhs[row];
            self.cost[col] = 0.0;
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Bland's rule simplex on the current cost row. `allowed` masks columns
    /// permitted to enter the basis.
    fn run(&mut self, allowed: &[bool], max_pivots: usize) -> Result<(), LpError> {
        loop {
            if self.pivots > max_pivots {
                return Err(LpError::PivotLimit { limit: max_pivots });
            }
            let mut entering = None;
            for j in 0..self.cols {
                if allowed[j] && self.cost[j] < -COST_EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leaving: Option<usize> = None;
            let mut best = f64::INFINITY;
            for i in 0..self.rows {
                let a = self.t[i][col];
                if a > PIVOT_EPS {
                    let ratio = self.rhs[i] / a;
                    // Bland tie-break: lowest basis index among equal ratios.
                    if ratio < best - 1e-14
                        || (ratio < best + 1e-14
                            && leaving.is_some_and(|l| self.basis[i] < self.basis[l]))
                    {
                        best = ratio;
                        leaving = Some(i);
                    }
                }
            }
            let Some(row) = leaving else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
        }
    }
}

/// Solves min c·x s.t. A·x = b, x ≥ 0 by two-phase simplex.
pub fn solve_lp(
    a: &[Vec<f64>],
    b: &[f64],
    c: &[f64],
    max_pivots: usize,
) -> Result<LpSolution, LpError> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(LpError::Shape(format!(
            "A is {}x{:?}, b has {}, c has {}",
            m,
            a.first().map(|r| r.len()),
            b.len(),
            n
        )));
    }

    // Sign-normalize so every right-hand side is nonnegative, then append one
    // artificial column per row.
    let cols = n + m;
    let mut t = vec![vec![0.0; cols]; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        rhs[i] = flip * b[i];
        t[i][n + i] = 1.0;
    }

    let mut tab = Tableau {
        rows: m,
        cols,
        t,
        rhs,
        basis: (n..n + m).collect(),
        cost: vec![0.0; cols],
        cost_rhs: 0.0,
        pivots: 0,
    };

    // Phase 1: minimize the sum of artificials. Reduced costs start as
    // c_j − Σ_i a_ij for original columns (artificials are basic at cost 1).
    for j in 0..n {
        tab.cost[j] = -(0..m).map(|i| tab.t[i][j]).sum::<f64>();
    }
    tab.cost_rhs = -tab.rhs.iter().sum::<f64>();
    let allowed: Vec<bool> = (0..cols).map(|j| j < n).collect();
    tab.run(&allowed, max_pivots)?;
    let phase1 = -tab.cost_rhs;
    if phase1 > 1e-7 {
        return Err(LpError::Infeasible { residual: phase1 });
    }

    // Pivot any artificial still basic (at value ~0) out on a real column.
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| tab.t[i][j].abs() > 1e-8) {
                tab.pivot(i, j);
            }
        }
    }

    // Phase 2: restore the true objective as a reduced-cost row.
    let basis = tab.basis.clone();
    tab.cost = vec![0.0; cols];
    for j in 0..n {
        tab.cost[j] = c[j];
    }
    tab.cost_rhs = 0.0;
    for (i, &bj) in basis.iter().enumerate() {
        let cb = if bj < n { c[bj] } else { 0.0 };
        if cb == 0.0 {
            continue;
        }
        for j in 0..cols {
            tab.cost[j] -= cb * tab.t[i][j];
        }
        tab.cost_rhs -= cb * tab.rhs[i];
    }
    for &bj in &basis {
        if bj < cols {
            tab.cost[bj] = 0.0;
        }
    }
    tab.run(&allowed, max_pivots)?;

    let mut x = vec![0.0; n];
    for (i, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            x[bj] = tab.rhs[i].max(0.0);
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_textbook_lp() {
        // min -x - 2y s.t. x + y + s1 = 4, x + 3y + s2 = 6, all ≥ 0.
        let a = vec![vec![1.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]];
        let b = vec![4.0, 6.0];
        let c = vec![-1.0, -2.0, 0.0, 0.0];
        let sol = solve_lp(&a, &b, &c, 1000).unwrap();
        assert!((sol.value - (-5.0)).abs() < 1e-9, "value {}", sol.value);
        assert!((sol.x[0] - 3.0).abs() < 1e-9 && (sol.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible() {
        // x = 1 and x = 2 simultaneously.
        let a = vec![vec![1.0], vec![1.0]];
        let b = vec![1.0, 2.0];
        let c = vec![0.0];
        assert!(matches!(
            solve_lp(&a, &b, &c, 1000),
            Err(LpError::Infeasible { .. })
        ));
    }

    #[test]
    fn detects_unbounded() {
        // min -x s.t. x - y = 1 with x, y ≥ 0 is unbounded below.
        let a = vec![vec![1.0, -1.0]];
        let b = vec![1.0];
        let c = vec![-1.0, 0.0];
        assert!(matches!(
            solve_lp(&a, &b, &c, 1000),
            Err(LpError::Unbounded)
        ));
    }

    #[test]
    fn handles_negative_rhs_rows() {
        // Same feasible set as the textbook LP with flipped row signs.
        let a = vec![vec![-1.0, -1.0, -1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]];
        let b = vec![-4.0, 6.0];
        let c = vec![-1.0, -2.0, 0.0, 0.0];
        let sol = solve_lp(&a, &b, &c, 1000).unwrap();
        assert!((sol.value - (-5.0)).abs() < 1e-9);
    }

    #[test]
    fn degenerate_program_terminates() {
        let a = vec![
            vec![1.0, 1.0, 1.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0, 1.0],
        ];
        let b = vec![1.0, 1.0, 1.0];
        let c = vec![-1.0, -1.0, 0.0, 0.0, 0.0];
        let sol = solve_lp(&a, &b, &c, 10_000).unwrap();
        assert!((sol.value + 1.0).abs() < 1e-9);
    }
}
