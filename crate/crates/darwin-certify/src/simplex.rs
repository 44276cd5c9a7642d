//! Geometry of encoding-state families: affine independence, unique simplex
//! coordinates, and Carathéodory witnesses for dependent families.
//!
//! Hermitian matrices are vectorized over a real orthonormal parametrization
//! (diagonal entries, then √2-scaled real and imaginary off-diagonal parts),
//! so Euclidean inner products of coordinate vectors equal Hilbert–Schmidt
//! inner products and singular-value thresholds are basis-independent.

use thiserror::Error;

use crate::qmath::{eigh, trace_norm, CMatrix, DensityMatrix};
use crate::solvers::{solve_lp, LpError};

#[derive(Debug, Error)]
pub enum SimplexError {
    #[error("family is empty")]
    EmptyFamily,
    #[error("states have mixed dimensions")]
    MixedDimensions,
    #[error("family is affinely dependent; coordinates are not unique")]
    AffinelyDependent,
    #[error("target lies outside the affine hull (residual {residual:.3e} > tol {tol:.3e})")]
    TargetOutsideAffineHull { residual: f64, tol: f64 },
    #[error("vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("input is not a probability distribution (sum = {sum:.12})")]
    NotADistribution { sum: f64 },
    #[error("family is affinely dependent but no deletion admits a convex witness (best residual {residual:.3e})")]
    WitnessSearchFailed { residual: f64 },
    #[error("witness linear program failed: {0}")]
    Lp(#[from] LpError),
}

/// A finite family of equal-dimension density matrices.
#[derive(Debug, Clone)]
pub struct StateFamily {
    states: Vec<DensityMatrix>,
}

impl StateFamily {
    pub fn new(states: Vec<DensityMatrix>) -> Result<Self, SimplexError> {
        if states.is_empty() {
            return Err(SimplexError::EmptyFamily);
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(SimplexError::MixedDimensions);
        }
        Ok(StateFamily { states })
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }
}

/// Real orthonormal vectorization of a Hermitian matrix.
pub fn vectorize_hermitian(m: &CMatrix) -> Vec<f64> {
    let n = m.dim();
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut v = Vec::with_capacity(n * n);
    for i in 0..n {
        v.push(m[(i, i)].re);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            v.push(sqrt2 * m[(i, j)].re);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            v.push(sqrt2 * m[(i, j)].im);
        }
    }
    v
}

/// Outcome of the affine-independence decision.
#[derive(Debug, Clone)]
pub struct IndependenceReport {
    pub independent: bool,
    /// Rank of the difference family σ_k − σ_last.
    pub rank: usize,
    /// Singular values of the vectorized differences, descending.
    pub singular_values: Vec<f64>,
    /// Smallest retained singular value sits within 10× of the tolerance:
    /// the decision is numerically fragile and reported as such.
    pub marginal: bool,
}

/// Default tolerance on singular values of vectorized difference matrices.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Decides affine independence by the rank of the k−1 vectorized differences
/// to the last state, with singular values thresholded at `tol`.
pub fn is_affinely_independent(family: &StateFamily, tol: f64) -> IndependenceReport {
    let k = family.len();
    if k == 1 {
        return IndependenceReport {
            independent: true,
            rank: 0,
            singular_values: Vec::new(),
            marginal: false,
        };
    }
    let n = family.dim();
    let last = family.states().last().unwrap().matrix();
    let diffs: Vec<Vec<f64>> = family.states()[..k - 1]
        .iter()
        .map(|s| vectorize_hermitian(&s.matrix().sub(last)))
        .collect();

    // Gram matrix of the differences; singular values are √eigenvalues.
    let m = diffs.len();
    let gram = CMatrix::from_fn(m, |i, j| {
        let dot: f64 = diffs[i].iter().zip(&diffs[j]).map(|(a, b)| a * b).sum();
        crate::qmath::C64::new(dot, 0.0)
    });
    let mut svs: Vec<f64> = eigh(&gram)
        .values
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    svs.reverse();
    let rank = svs.iter().filter(|s| **s > tol).count();
    // At most n²−1 affinely independent differences fit in the traceless
    // Hermitian space, so k_max > n² forces dependence.
    let independent = rank == k - 1 && k <= n * n;
    let marginal = independent
        && svs
            .iter()
            .filter(|s| **s > tol)
            .fold(f64::INFINITY, |a, &b| a.min(b))
            <= 10.0 * tol;
    IndependenceReport {
        independent,
        rank,
        singular_values: svs,
        marginal,
    }
}

/// Unique affine coordinates of `target` in an affinely independent family:
/// coefficients q with Σq = 1 and Σ q_k σ_k = target (within `tol` in trace
/// norm). Coefficients may be negative; convexity is the caller's question.
pub fn simplex_coordinates(
    family: &StateFamily,
    target: &DensityMatrix,
    tol: f64,
) -> Result<Vec<f64>, SimplexError> {
    if target.dim() != family.dim() {
        return Err(SimplexError::MixedDimensions);
    }
    let report = is_affinely_independent(family, DEFAULT_RANK_TOL);
    if !report.independent {
        return Err(SimplexError::AffinelyDependent);
    }
    let k = family.len();
    if k == 1 {
        let residual = trace_norm(&family.states()[0].matrix().sub(target.matrix()));
        if residual > tol {
            return Err(SimplexError::TargetOutsideAffineHull { residual, tol });
        }
        return Ok(vec![1.0]);
    }
    let last = family.states().last().unwrap().matrix();
    let diffs: Vec<Vec<f64>> = family.states()[..k - 1]
        .iter()
        .map(|s| vectorize_hermitian(&s.matrix().sub(last)))
        .collect();
    let rhs_vec = vectorize_hermitian(&target.matrix().sub(last));

    // Normal equations on the Gram matrix, solved through its spectrum.
    let m = diffs.len();
    let gram = CMatrix::from_fn(m, |i, j| {
        let dot: f64 = diffs[i].iter().zip(&diffs[j]).map(|(a, b)| a * b).sum();
        crate::qmath::C64::new(dot, 0.0)
    });
    let rhs: Vec<f64> = diffs
        .iter()
        .map(|d| d.iter().zip(&rhs_vec).map(|(a, b)| a * b).sum())
        .collect();
    let dec = eigh(&gram);
    let top = dec.values.last().copied().unwrap_or(0.0).max(1e-300);
    let mut q = vec![0.0; m];
    for (idx, &lam) in dec.values.iter().enumerate() {
        if lam <= top * 1e-13 {
            continue;
        }
        let v = dec.vector(idx);
        let proj: f64 = v.iter().zip(&rhs).map(|(vi, ri)| vi.re * ri).sum();
        for (qi, vi) in q.iter_mut().zip(&v) {
            *qi += vi.re * proj / lam;
        }
    }

    let mut coeffs = q;
    let q_last = 1.0 - coeffs.iter().sum::<f64>();
    coeffs.push(q_last);

    let mut recon = CMatrix::zeros(family.dim());
    for (c, s) in coeffs.iter().zip(family.states()) {
        recon = recon.add(&s.matrix().scale_re(*c));
    }
    let residual = trace_norm(&recon.sub(target.matrix()));
    if residual > tol {
        return Err(SimplexError::TargetOutsideAffineHull { residual, tol });
    }
    Ok(coeffs)
}

/// Searches for a convex decomposition of `target` with an exact zero
/// coefficient, deleting coordinates in increasing index order and solving a
/// linear feasibility problem over each deleted subfamily.
///
/// Returns `Ok(None)` when the family is affinely independent (no witness can
/// exist); `Ok(Some(q))` with Σq = 1, q ≥ 0, q_j = 0 for the first feasible
/// deletion j; an error if the family is dependent yet every deletion fails
/// numerically.
pub fn caratheodory_witness(
    family: &StateFamily,
    target: &DensityMatrix,
    tol: f64,
) -> Result<Option<Vec<f64>>, SimplexError> {
    if target.dim() != family.dim() {
        return Err(SimplexError::MixedDimensions);
    }
    let report = is_affinely_independent(family, DEFAULT_RANK_TOL);
    if report.independent {
        return Ok(None);
    }
    let k = family.len();
    let mut best_residual = f64::INFINITY;
    for deleted in 0..k {
        let kept: Vec<usize> = (0..k).filter(|&i| i != deleted).collect();
        if let Some(q_kept) = convex_fit(family, &kept, target, tol)? {
            let mut witness = vec![0.0; k];
            for (slot, &idx) in kept.iter().enumerate() {
                witness[idx] = q_kept[slot];
            }
            // Reconstruction check in trace norm.
            let mut recon = CMatrix::zeros(family.dim());
            for (c, s) in witness.iter().zip(family.states()) {
                recon = recon.add(&s.matrix().scale_re(*c));
            }
            let residual = trace_norm(&recon.sub(target.matrix()));
            if residual <= tol {
                return Ok(Some(witness));
            }
            best_residual = best_residual.min(residual);
        }
    }
    Err(SimplexError::WitnessSearchFailed {
        residual: best_residual,
    })
}

/// Least-l1 fit of `target` as a convex combination of the kept states; the
/// normalization row is exact, the matrix rows carry slack variables.
fn convex_fit(
    family: &StateFamily,
    kept: &[usize],
    target: &DensityMatrix,
    tol: f64,
) -> Result<Option<Vec<f64>>, SimplexError> {
    let cols: Vec<Vec<f64>> = kept
        .iter()
        .map(|&i| vectorize_hermitian(family.states()[i].matrix()))
        .collect();
    let rhs = vectorize_hermitian(target.matrix());
    let rows = rhs.len();
    let m = kept.len();

    // Variables: [q_0..q_{m-1}, u_0..u_{rows-1}, v_0..v_{rows-1}].
    let nvars = m + 2 * rows;
    let mut a = vec![vec![0.0; nvars]; rows + 1];
    let mut b = vec![0.0; rows + 1];
    for r in 0..rows {
        for (c, col) in cols.iter().enumerate() {
            a[r][c] = col[r];
        }
        a[r][m + r] = 1.0;
        a[r][m + rows + r] = -1.0;
        b[r] = rhs[r];
    }
    for c in 0..m {
        a[rows][c] = 1.0;
    }
    b[rows] = 1.0;
    let mut cost = vec![0.0; nvars];
    for slot in cost.iter_mut().skip(m) {
        *slot = 1.0;
    }

    let sol = solve_lp(&a, &b, &cost, 100_000)?;
    if sol.value > tol {
        return Ok(None);
    }
    Ok(Some(sol.x[..m].to_vec()))
}

/// Total variation distance ½·Σ|p_k − q_k| between probability vectors.
pub fn statistical_distance(p: &[f64], q: &[f64]) -> Result<f64, SimplexError> {
    if p.len() != q.len() {
        return Err(SimplexError::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    for dist in [p, q] {
        let sum: f64 = dist.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || dist.iter().any(|x| *x < -1e-12) {
            return Err(SimplexError::NotADistribution { sum });
        }
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}
