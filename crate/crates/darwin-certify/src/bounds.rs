//! Distinguishability cut-off and the quantitative objectivity bounds.
//!
//! The cut-off P̂ = 1 − ½·max_ρ min_k Tr[E_k ρ] depends only on the pointer
//! POVM. Whenever every observer's worst-case guessing probability exceeds
//! P̂, the encoding states are forced to be affinely independent, which in
//! turn guarantees a noncontextual explanation of each observer's statistics.
//! The maximin is solved with a certified primal/dual bracket.

use thiserror::Error;

use crate::qmath::{DensityMatrix, Povm};
use crate::solvers::{maximin_state, SaddleOptions, SolverError};

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("deviation bound needs 0 < delta < 1 (got {delta})")]
    BadDelta { delta: f64 },
    #[error("deviation bound needs N ≥ t ≥ 1 and d_A ≥ 2 (got d_A={d_a}, t={t}, N={n})")]
    BadSizes { d_a: usize, t: usize, n: usize },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Certified cut-off computation.
#[derive(Debug, Clone)]
pub struct CutoffResult {
    /// P̂ = 1 − maximin/2.
    pub p_hat: f64,
    /// max_ρ min_k Tr[E_k ρ], reported as the bracket midpoint.
    pub maximin: f64,
    /// Certified lower side of the bracket (achieved by `witness_state`).
    pub primal_value: f64,
    /// Certified upper side (achieved by `optimal_weights`).
    pub dual_value: f64,
    /// Simplex weights λ with λ_max(Σ λ_k E_k) = `dual_value`.
    pub optimal_weights: Vec<f64>,
    /// State achieving `primal_value`.
    pub witness_state: DensityMatrix,
    /// Width of the certified bracket.
    pub gap: f64,
    pub converged: bool,
    /// Set when the maximizer sits on the boundary of the strictly-positive
    /// prior region (maximin numerically zero); cannot occur for POVMs with
    /// nonzero effects but reported for honesty.
    pub boundary: bool,
}

/// Computes the distinguishability cut-off P̂ for a pointer POVM.
pub fn distinguishability_bound(pointer: &Povm, tol: f64) -> Result<CutoffResult, BoundsError> {
    let opts = SaddleOptions {
        tol,
        ..SaddleOptions::default()
    };
    let r = maximin_state(pointer.effects(), &opts)?;
    let maximin = 0.5 * (r.primal_value + r.dual_value);
    Ok(CutoffResult {
        p_hat: 1.0 - 0.5 * maximin,
        maximin,
        primal_value: r.primal_value,
        dual_value: r.dual_value,
        optimal_weights: r.weights,
        witness_state: r.witness,
        gap: r.gap,
        converged: r.converged,
        boundary: maximin <= 1e-9,
    })
}

/// Cut-off of a rank-1 projective pointer basis in dimension d: 1 − 1/(2d).
pub fn projective_bound(d: usize) -> f64 {
    1.0 - 1.0 / (2.0 * d as f64)
}

/// Classical-objectivity decision for one process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Verdict {
    /// η exceeds P̂ by more than the combined certificate tolerance.
    Emerged,
    /// η and P̂ are indistinguishable at solver precision.
    Marginal,
    /// η does not exceed P̂; the cut-off criterion is not met.
    NotCertified,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Emerged => write!(f, "EMERGED"),
            Verdict::Marginal => write!(f, "MARGINAL"),
            Verdict::NotCertified => write!(f, "NOT_CERTIFIED"),
        }
    }
}

/// Applies the cut-off: EMERGED iff η − P̂ clears the combined certificate
/// tolerance, MARGINAL when the difference is inside it. The strict
/// inequality of the cut-off definition is undecidable at solver precision,
/// so the band keeps the verdict honest.
pub fn classical_objectivity_verdict(
    eta: f64,
    cutoff: &CutoffResult,
    solver_tols: (f64, f64),
) -> Verdict {
    let combined = solver_tols.0 + solver_tols.1;
    let diff = eta - cutoff.p_hat;
    if diff > combined {
        Verdict::Emerged
    } else if diff.abs() <= combined {
        Verdict::Marginal
    } else {
        Verdict::NotCertified
    }
}

/// Lower bound 1 − 6t·(1−η)^{1/4} on the probability that all t observers
/// report the encoded label with optimal measurements. May be negative, in
/// which case it is vacuous and reported as-is.
pub fn agreement_lower_bound(t: usize, eta: f64) -> f64 {
    debug_assert!(t >= 1);
    let delta = (1.0 - eta).max(0.0);
    1.0 - 6.0 * t as f64 * delta.powf(0.25)
}

/// Diamond-norm deviation bound for finite environments:
/// (27·ln2·d_A⁶·log₂(d_A)·t / (N·δ³))^(1/3).
///
/// The logarithm is read base-2, consistent with the explicit ln(2)
/// conversion factor in the expression.
pub fn finite_env_deviation_bound(
    d_a: usize,
    t: usize,
    n: usize,
    delta: f64,
) -> Result<f64, BoundsError> {
    if !(0.0..1.0).contains(&delta) || delta == 0.0 {
        return Err(BoundsError::BadDelta { delta });
    }
    if d_a < 2 || t < 1 || n < t {
        return Err(BoundsError::BadSizes { d_a, t, n });
    }
    let d = d_a as f64;
    let num = 27.0 * std::f64::consts::LN_2 * d.powi(6) * d.log2() * t as f64;
    Ok((num / (n as f64 * delta.powi(3))).powf(1.0 / 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{CMatrix, HermitianMatrix, C64};

    #[test]
    fn projective_bases_match_closed_form() {
        for d in 2..=6 {
            let cutoff = distinguishability_bound(&Povm::computational(d), 1e-8).unwrap();
            assert!(cutoff.converged, "gap {}", cutoff.gap);
            assert!(
                (cutoff.p_hat - projective_bound(d)).abs() < 1e-6,
                "d={d}: {} vs {}",
                cutoff.p_hat,
                projective_bound(d)
            );
            assert!((cutoff.maximin - 1.0 / d as f64).abs() < 1e-6);
            // Exact algebraic relation between the reported fields.
            assert!((cutoff.p_hat - (1.0 - 0.5 * cutoff.maximin)).abs() < 1e-12);
        }
    }

    #[test]
    fn projective_bound_values() {
        assert!((projective_bound(2) - 0.75).abs() < 1e-15);
        assert!((projective_bound(3) - (1.0 - 1.0 / 6.0)).abs() < 1e-15);
        assert!((projective_bound(1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn smeared_two_outcome_pointer() {
        // Effects 0.8|0⟩⟨0|+0.2|1⟩⟨1| and its complement: maximin = 1/2.
        let e0 = HermitianMatrix::new(CMatrix::from_fn(2, |i, j| {
            if i == j {
                C64::new(if i == 0 { 0.8 } else { 0.2 }, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
        .unwrap();
        let e1 = HermitianMatrix::identity(2).sub(&e0);
        let pointer = Povm::new(vec![e0.clone(), e1.clone()]).unwrap();
        let cutoff = distinguishability_bound(&pointer, 1e-8).unwrap();
        // Independent oracle: scan the dual over λ ∈ [0,1].
        let mut oracle = f64::INFINITY;
        for i in 0..=10_000 {
            let lam = i as f64 / 10_000.0;
            let m = e0.scale(lam).add(&e1.scale(1.0 - lam));
            let top = crate::qmath::eigh(m.matrix()).values[1];
            oracle = oracle.min(top);
        }
        assert!(
            (cutoff.maximin - oracle).abs() < 1e-7,
            "{} vs scan {oracle}",
            cutoff.maximin
        );
        assert!((cutoff.maximin - 0.5).abs() < 1e-7);
        assert!((cutoff.p_hat - 0.75).abs() < 1e-7);
    }

    #[test]
    fn single_outcome_pointer_gives_half() {
        let pointer = Povm::measurement(vec![HermitianMatrix::identity(3)]).unwrap();
        let cutoff = distinguishability_bound(&pointer, 1e-9).unwrap();
        assert!((cutoff.maximin - 1.0).abs() < 1e-9);
        assert!((cutoff.p_hat - 0.5).abs() < 1e-9);
    }

    #[test]
    fn duality_sandwich() {
        let pointer = Povm::computational(3);
        let c = distinguishability_bound(&pointer, 1e-8).unwrap();
        // min_k Tr[E_k witness] ≤ maximin ≤ λ_max(Σ λ_k E_k).
        let wmin = pointer
            .effects()
            .iter()
            .map(|e| e.pair(c.witness_state.hermitian()))
            .fold(f64::INFINITY, f64::min);
        assert!((wmin - c.primal_value).abs() < 1e-10);
        assert!(c.primal_value <= c.maximin + 1e-12);
        assert!(c.maximin <= c.dual_value + 1e-12);
        assert!(c.gap <= 1e-8);
    }

    #[test]
    fn verdict_bands() {
        let cutoff = distinguishability_bound(&Povm::computational(2), 1e-9).unwrap();
        assert_eq!(
            classical_objectivity_verdict(1.0, &cutoff, (1e-9, 1e-9)),
            Verdict::Emerged
        );
        assert_eq!(
            classical_objectivity_verdict(0.5, &cutoff, (1e-9, 1e-9)),
            Verdict::NotCertified
        );
        assert_eq!(
            classical_objectivity_verdict(0.750000001, &cutoff, (5e-7, 5e-7)),
            Verdict::Marginal
        );
    }

    #[test]
    fn agreement_bound_values() {
        assert!((agreement_lower_bound(1, 1.0) - 1.0).abs() < 1e-15);
        assert!((agreement_lower_bound(1, 0.9999) - 0.4).abs() < 1e-10);
        assert!((agreement_lower_bound(3, 0.9999) - (-0.8)).abs() < 1e-10);
    }

    #[test]
    fn deviation_bound_values() {
        // d_A=2, t=1, δ=0.5: N = 9580 brings the bound to ≈ 1.
        let b = finite_env_deviation_bound(2, 1, 9580, 0.5).unwrap();
        assert!((b - 1.0).abs() < 1e-3, "bound {b}");
        let b6 = finite_env_deviation_bound(2, 1, 1_000_000, 0.5).unwrap();
        assert!((b6 - 0.2126).abs() < 5e-4, "bound {b6}");
        // Quadrupling N shrinks the bound by 4^(-1/3).
        let b1 = finite_env_deviation_bound(2, 1, 10_000, 0.5).unwrap();
        let b4 = finite_env_deviation_bound(2, 1, 40_000, 0.5).unwrap();
        assert!((b4 / b1 - 0.25f64.powf(1.0 / 3.0)).abs() < 1e-12);
        // Parameter validation.
        assert!(finite_env_deviation_bound(2, 1, 10, 0.0).is_err());
        assert!(finite_env_deviation_bound(2, 3, 2, 0.5).is_err());
        assert!(finite_env_deviation_bound(1, 1, 10, 0.5).is_err());
    }
}
