//! Exact solution of small zero-sum matrix games.
//!
//! `value = min over column mixtures λ of max over rows of (C·λ)` — the row
//! player maximizes, the column player minimizes. Both optimal mixtures are
//! produced by solving the two sides as separate linear programs; their values
//! must coincide (minimax), which is asserted as a cheap internal check.

use super::lp::{solve_lp, LpError};

#[derive(Debug, Clone)]
pub struct GameSolution {
    pub value: f64,
    /// Optimal maximizing mixture over rows.
    pub row_mix: Vec<f64>,
    /// Optimal minimizing mixture over columns.
    pub col_mix: Vec<f64>,
}

/// Solves the game for a dense payoff matrix (rows × cols).
pub fn solve_zero_sum(payoff: &[Vec<f64>], max_pivots: usize) -> Result<GameSolution, LpError> {
    let m = payoff.len();
    let k = payoff.first().map_or(0, |r| r.len());
    if m == 0 || k == 0 {
        return Err(LpError::Shape("empty payoff matrix".into()));
    }

    // Shift entries to be nonnegative so both LP values are sign-constrained.
    let min_entry = payoff
        .iter()
        .flat_map(|r| r.iter())
        .fold(f64::INFINITY, |a, &b| a.min(b));
    let shift = if min_entry < 0.0 { -min_entry } else { 0.0 };

    // Column player: min z s.t. C·λ − z·1 + s = 0, Σλ = 1.
    // Variables [λ_0..λ_{k-1}, z, s_0..s_{m-1}].
    let ncol = k + 1 + m;
    let mut a = vec![vec![0.0; ncol]; m + 1];
    let mut b = vec![0.0; m + 1];
    for i in 0..m {
        for j in 0..k {
            a[i][j] = payoff[i][j] + shift;
        }
        a[i][k] = -1.0;
        a[i][k + 1 + i] = 1.0;
    }
    for j in 0..k {
        a[m][j] = 1.0;
    }
    b[m] = 1.0;
    let mut c = vec![0.0; ncol];
    c[k] = 1.0;
    let col_lp = solve_lp(&a, &b, &c, max_pivots)?;
    let col_value = col_lp.value - shift;
    let mut col_mix: Vec<f64> = col_lp.x[..k].to_vec();
    renormalize(&mut col_mix);

    // Row player: max v s.t. Cᵀ·q − v·1 − t = 0, Σq = 1.
    // Variables [q_0..q_{m-1}, v, t_0..t_{k-1}].
    let nrow = m + 1 + k;
    let mut a2 = vec![vec![0.0; nrow]; k + 1];
    let mut b2 = vec![0.0; k + 1];
    for j in 0..k {
        for i in 0..m {
            a2[j][i] = payoff[i][j] + shift;
        }
        a2[j][m] = -1.0;
        a2[j][m + 1 + j] = -1.0;
    }
    for i in 0..m {
        a2[k][i] = 1.0;
    }
    b2[k] = 1.0;
    let mut c2 = vec![0.0; nrow];
    c2[m] = -1.0;
    let row_lp = solve_lp(&a2, &b2, &c2, max_pivots)?;
    let row_value = -row_lp.value - shift;
    let mut row_mix: Vec<f64> = row_lp.x[..m].to_vec();
    renormalize(&mut row_mix);

    debug_assert!(
        (col_value - row_value).abs() < 1e-7,
        "minimax values diverged: {col_value} vs {row_value}"
    );

    Ok(GameSolution {
        value: 0.5 * (col_value + row_value),
        row_mix,
        col_mix,
    })
}

fn renormalize(p: &mut [f64]) {
    for v in p.iter_mut() {
        *v = v.max(0.0);
    }
    let s: f64 = p.iter().sum();
    if s > 0.0 {
        for v in p.iter_mut() {
            *v /= s;
        }
    } else if let Some(first) = p.first_mut() {
        *first = 1.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_pennies() {
        let payoff = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
        let sol = solve_zero_sum(&payoff, 1000).unwrap();
        assert!(sol.value.abs() < 1e-9);
        assert!((sol.row_mix[0] - 0.5).abs() < 1e-9);
        assert!((sol.col_mix[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn dominant_column() {
        // Column 1 dominates for the minimizer: payoff always 0.25.
        let payoff = vec![vec![0.9, 0.25], vec![0.5, 0.25]];
        let sol = solve_zero_sum(&payoff, 1000).unwrap();
        assert!((sol.value - 0.25).abs() < 1e-9);
        assert!((sol.col_mix[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn value_within_payoff_hull() {
        // Saddle value must lie between the extreme payoffs; strategies on
        // the simplex. A few fixed dense games.
        let games = [
            vec![
                vec![0.3, 0.7, 0.1],
                vec![0.6, 0.2, 0.9],
                vec![0.4, 0.4, 0.5],
            ],
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.6, 0.6]],
        ];
        for payoff in games {
            let sol = solve_zero_sum(&payoff, 1000).unwrap();
            // Guaranteed performance check: row mix guarantees ≥ value − tol
            // against every column, col mix guarantees ≤ value + tol.
            let m = payoff.len();
            let k = payoff[0].len();
            for j in 0..k {
                let got: f64 = (0..m).map(|i| sol.row_mix[i] * payoff[i][j]).sum();
                assert!(got >= sol.value - 1e-8);
            }
            for i in 0..m {
                let got: f64 = (0..k).map(|j| sol.col_mix[j] * payoff[i][j]).sum();
                assert!(got <= sol.value + 1e-8);
            }
        }
    }
}
