//! Certified maximin eigenvalue optimization over the state space:
//!
//!   maximize over density matrices ρ:   min_i Tr[A_i ρ]
//!
//! for a finite family of Hermitian operators. The dual problem is the
//! minimization of λ_max(Σ_i λ_i A_i) over the probability simplex. Both are
//! attacked at once by a cutting-plane scheme: unit vectors u approximate
//! λ_max from below through the model max_u u†(Σλ_i A_i)u, the resulting
//! matrix game is solved exactly as a pair of LPs, the game's row mixture
//! yields a primal witness ρ = Σ_u q_u·uu†, and fresh eigenvector cuts come
//! from the dual iterate. Every reported bound is certified: the lower bound
//! by an explicit witness state, the upper bound by an explicit weight vector.

use crate::qmath::{eigh, CMatrix, DensityMatrix, HermitianMatrix, C64};

use super::game::solve_zero_sum;
use super::SolverError;

#[derive(Debug, Clone)]
pub struct SaddleResult {
    /// min_i Tr[A_i ρ] achieved by `witness` — a certified lower bound.
    pub primal_value: f64,
    /// Best dual evaluation λ_max(Σ λ_i A_i) — a certified upper bound.
    pub dual_value: f64,
    /// Simplex weights achieving `dual_value`.
    pub weights: Vec<f64>,
    /// State achieving `primal_value`.
    pub witness: DensityMatrix,
    pub gap: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub struct SaddleOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub max_cuts: usize,
    pub lp_pivot_cap: usize,
}

impl Default for SaddleOptions {
    fn default() -> Self {
        SaddleOptions {
            tol: crate::qmath::tol::CERTIFICATE,
            max_iterations: 300,
            max_cuts: 240,
            lp_pivot_cap: 200_000,
        }
    }
}

/// Maximizes min_i Tr[A_i ρ] over density matrices.
pub fn maximin_state(
    ops: &[HermitianMatrix],
    opts: &SaddleOptions,
) -> Result<SaddleResult, SolverError> {
    if ops.is_empty() {
        return Err(SolverError::EmptyOperatorFamily);
    }
    let dim = ops[0].dim();
    if ops.iter().any(|a| a.dim() != dim) {
        return Err(SolverError::MixedDimensions);
    }

    let mut cuts: Vec<Vec<C64>> = Vec::new();
    // Seed cuts: computational basis, the uniform superposition, and the top
    // eigenvector of every operator. Symmetric instances close at once.
    for k in 0..dim {
        push_cut(&mut cuts, crate::qmath::basis_ket(dim, k));
    }
    let amp = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
    push_cut(&mut cuts, vec![amp; dim]);
    for a in ops {
        let dec = eigh(a.matrix());
        push_cut(&mut cuts, dec.vector(dim - 1));
    }

    let mut best_primal = f64::NEG_INFINITY;
    let mut best_witness: Option<DensityMatrix> = None;
    let mut best_dual = f64::INFINITY;
    let mut best_weights = vec![1.0 / ops.len() as f64; ops.len()];
    let mut iterations = 0;

    for iter in 1..=opts.max_iterations {
        iterations = iter;
        let payoff: Vec<Vec<f64>> = cuts
            .iter()
            .map(|u| ops.iter().map(|a| quad_form(a.matrix(), u)).collect())
            .collect();
        let game = solve_zero_sum(&payoff, opts.lp_pivot_cap)
            .map_err(|source| SolverError::MasterLp { source })?;

        // Dual evaluation at the game's column mixture.
        let weighted = combine(ops, &game.col_mix);
        let dec = eigh(&weighted);
        let lam_max = dec.values[dim - 1];
        if lam_max < best_dual {
            best_dual = lam_max;
            best_weights = game.col_mix.clone();
        }

        // Primal witness from the game's row mixture over cut vectors.
        let rho = mixture_state(&cuts, &game.row_mix, dim);
        let val = ops
            .iter()
            .map(|a| a.pair(rho.hermitian()))
            .fold(f64::INFINITY, f64::min);
        if val > best_primal {
            best_primal = val;
            best_witness = Some(rho);
        }

        if best_dual - best_primal <= opts.tol {
            break;
        }

        // New cuts: the top eigenspace of the dual iterate (everything within
        // a slice of the current gap participates in a degenerate optimum).
        let slice = (best_dual - best_primal).max(1e-12) * 0.1;
        let mut added = false;
        for k in (0..dim).rev().take(3) {
            if lam_max - dec.values[k] <= slice {
                added |= push_cut(&mut cuts, dec.vector(k));
            }
        }
        if !added {
            // Model already exact at this iterate; bracket cannot improve.
            break;
        }
        if cuts.len() > opts.max_cuts {
            let keep = cuts.len() - opts.max_cuts / 2;
            cuts.drain(0..keep.min(cuts.len() - dim - 1));
        }
    }

    let witness = best_witness.unwrap_or_else(|| DensityMatrix::maximally_mixed(dim));
    let gap = best_dual - best_primal;
    Ok(SaddleResult {
        primal_value: best_primal,
        dual_value: best_dual,
        weights: best_weights,
        witness,
        gap,
        converged: gap <= opts.tol,
        iterations,
    })
}

/// Minimizes max_i Tr[A_i ρ] over density matrices (the mirrored problem).
/// Weights and witness keep the same meaning; bounds flip roles.
pub fn minimax_state(
    ops: &[HermitianMatrix],
    opts: &SaddleOptions,
) -> Result<SaddleResult, SolverError> {
    let negated: Vec<HermitianMatrix> = ops.iter().map(|a| a.scale(-1.0)).collect();
    let r = maximin_state(&negated, opts)?;
    Ok(SaddleResult {
        primal_value: -r.primal_value, // max_i Tr[A_i ρ̄], upper bound
        dual_value: -r.dual_value,     // certified lower bound
        weights: r.weights,
        witness: r.witness,
        gap: r.gap,
        converged: r.converged,
        iterations: r.iterations,
    })
}

fn quad_form(a: &CMatrix, u: &[C64]) -> f64 {
    let av = a.matvec(u);
    u.iter()
        .zip(&av)
        .map(|(ui, avi)| (ui.conj() * avi).re)
        .sum()
}

fn combine(ops: &[HermitianMatrix], weights: &[f64]) -> CMatrix {
    let dim = ops[0].dim();
    let mut acc = CMatrix::zeros(dim);
    for (a, &w) in ops.iter().zip(weights) {
        if w != 0.0 {
            acc = acc.add(&a.matrix().scale_re(w));
        }
    }
    acc
}

fn mixture_state(cuts: &[Vec<C64>], weights: &[f64], dim: usize) -> DensityMatrix {
    let mut acc = CMatrix::zeros(dim);
    for (u, &w) in cuts.iter().zip(weights) {
        if w > 1e-15 {
            acc = acc.add(&CMatrix::projector(u).scale_re(w));
        }
    }
    let tr = acc.trace().re;
    if tr <= 0.0 {
        return DensityMatrix::maximally_mixed(dim);
    }
    DensityMatrix::from_cmatrix(acc.scale_re(1.0 / tr))
        .unwrap_or_else(|_| DensityMatrix::maximally_mixed(dim))
}

fn push_cut(cuts: &mut Vec<Vec<C64>>, mut u: Vec<C64>) -> bool {
    crate::qmath::normalize(&mut u);
    if crate::qmath::vec_norm(&u) < 0.5 {
        return false;
    }
    let duplicate = cuts.iter().any(|v| {
        let overlap: C64 = v.iter().zip(&u).map(|(a, b)| a.conj() * b).sum();
        overlap.norm() > 1.0 - 1e-12
    });
    if duplicate {
        return false;
    }
    cuts.push(u);
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::Povm;

    fn opts(tol: f64) -> SaddleOptions {
        SaddleOptions {
            tol,
            ..SaddleOptions::default()
        }
    }

    #[test]
    fn projective_basis_maximin_is_inverse_dim() {
        for dim in 2..=5 {
            let povm = Povm::computational(dim);
            let r = maximin_state(povm.effects(), &opts(1e-9)).unwrap();
            assert!(r.converged, "dim {dim} gap {}", r.gap);
            let expect = 1.0 / dim as f64;
            assert!((r.primal_value - expect).abs() < 1e-8);
            assert!((r.dual_value - expect).abs() < 1e-8);
        }
    }

    #[test]
    fn single_operator_gives_top_eigenvalue() {
        let op = HermitianMatrix::identity(3);
        let r = maximin_state(&[op], &opts(1e-9)).unwrap();
        assert!((r.primal_value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn smeared_two_outcome_povm() {
        // Effects diag(0.8, 0.2) and diag(0.2, 0.8): the balanced state gives
        // min_k Tr[E_k ρ] = 0.5, and no state does better.
        let e0 = HermitianMatrix::new(CMatrix::from_fn(2, |i, j| {
            if i == j {
                C64::new(if i == 0 { 0.8 } else { 0.2 }, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
        .unwrap();
        let e1 = HermitianMatrix::identity(2).sub(&e0);
        let r = maximin_state(&[e0, e1], &opts(1e-9)).unwrap();
        assert!(r.converged);
        assert!((r.primal_value - 0.5).abs() < 1e-8, "{}", r.primal_value);
    }

    #[test]
    fn bracket_is_always_ordered() {
        // Random PSD families: primal ≤ dual must hold whatever convergence.
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let dim = rng.gen_range(2..=4);
            let k = rng.gen_range(1..=4);
            let mut gs: Vec<CMatrix> = (0..k)
                .map(|_| {
                    let g = CMatrix::from_fn(dim, |_, _| {
                        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    });
                    g.matmul(&g.adjoint())
                })
                .collect();
            let total = gs.iter().fold(CMatrix::zeros(dim), |acc, g| acc.add(g));
            let inv_sqrt = crate::qmath::pinv_sqrt(&total, 1e-12);
            for g in gs.iter_mut() {
                *g = inv_sqrt.matmul(g).matmul(&inv_sqrt);
            }
            let ops: Vec<HermitianMatrix> = gs
                .into_iter()
                .map(|g| HermitianMatrix::new(g.symmetrize()).unwrap())
                .collect();
            let r = maximin_state(&ops, &opts(1e-7)).unwrap();
            assert!(r.primal_value <= r.dual_value + 1e-9);
            assert!(r.converged, "gap {}", r.gap);
            // Witness reproduces the reported primal value.
            let v = ops
                .iter()
                .map(|a| a.pair(r.witness.hermitian()))
                .fold(f64::INFINITY, f64::min);
            assert!((v - r.primal_value).abs() < 1e-9);
        }
    }
}
