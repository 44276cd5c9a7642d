//! Validated quantum-state primitives: Hermitian matrices, density matrices,
//! and POVMs.
//!
//! Constructors reject invalid inputs instead of repairing them; a caller
//! holding one of these types can rely on the invariants without re-checking.

use super::cmatrix::{basis_ket, CMatrix, C64};
use super::eigen::{cholesky_psd, eigh};
use super::QmathError;

/// Validation tolerances, layered by where the error can come from.
pub mod tol {
    /// Structural checks on stored values (traces, sums, PSD floors).
    pub const STRUCTURAL: f64 = 1e-10;
    /// Hermiticity defect allowed on construction.
    pub const HERMITICITY: f64 = 1e-12;
    /// Residual allowed on eigenpairs.
    pub const EIGEN_RESIDUAL: f64 = 1e-9;
    /// Default gap for optimization certificates.
    pub const CERTIFICATE: f64 = 1e-6;
    /// Dense eigendecomposition is used for validation up to this dimension;
    /// beyond it a Cholesky probe stands in.
    pub const DENSE_EIG_DIM: usize = 64;
}

/// Hermitian matrix validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    matrix: CMatrix,
}

impl HermitianMatrix {
    /// Validates Hermiticity and stores the symmetrized matrix.
    pub fn new(matrix: CMatrix) -> Result<Self, QmathError> {
        let defect = matrix.hermiticity_defect();
        if defect > tol::HERMITICITY {
            return Err(QmathError::NotHermitian { defect });
        }
        Ok(HermitianMatrix {
            matrix: matrix.symmetrize(),
        })
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix {
            matrix: CMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix {
            matrix: CMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Real-valued Hilbert–Schmidt pairing Tr[A·B].
    pub fn pair(&self, other: &HermitianMatrix) -> f64 {
        self.matrix.hs_inner(other.matrix()).re
    }

    /// Tr[A·ρ] against an arbitrary complex matrix.
    pub fn pair_matrix(&self, other: &CMatrix) -> f64 {
        self.matrix.hs_inner(other).re
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix {
            matrix: self.matrix.scale_re(s),
        }
    }

    pub fn add(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix {
            matrix: self.matrix.add(&other.matrix),
        }
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix {
            matrix: self.matrix.sub(&other.matrix),
        }
    }

    /// Kronecker product of Hermitian matrices (Hermitian by construction).
    pub fn tensor(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix {
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigh(&self.matrix).values[0]
    }

    /// Whether the matrix is numerically the zero matrix.
    pub fn is_zero(&self) -> bool {
        self.matrix.max_abs() <= 1e-14
    }
}

/// Unit-trace positive-semidefinite Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: HermitianMatrix) -> Result<Self, QmathError> {
        let trace = matrix.trace();
        if (trace - 1.0).abs() > tol::STRUCTURAL {
            return Err(QmathError::NotUnitTrace { trace });
        }
        if matrix.dim() <= tol::DENSE_EIG_DIM {
            let min_eig = matrix.min_eigenvalue();
            if min_eig < -tol::STRUCTURAL {
                return Err(QmathError::NotPsd { min_eig });
            }
        } else if !cholesky_psd(matrix.matrix(), tol::STRUCTURAL) {
            return Err(QmathError::NotPsd { min_eig: f64::NAN });
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn from_cmatrix(matrix: CMatrix) -> Result<Self, QmathError> {
        DensityMatrix::new(HermitianMatrix::new(matrix)?)
    }

    /// Pure state |ψ⟩⟨ψ| from a (not necessarily normalized) vector.
    pub fn pure(state: &[C64]) -> Result<Self, QmathError> {
        DensityMatrix::from_cmatrix(CMatrix::projector(state))
    }

    /// Computational basis state |k⟩⟨k|.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        DensityMatrix::pure(&basis_ket(dim, k)).expect("basis projector is a valid state")
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: HermitianMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn matrix(&self) -> &CMatrix {
        self.matrix.matrix()
    }

    /// Kronecker product of two states.
    pub fn tensor(&self, other: &DensityMatrix) -> Self {
        DensityMatrix {
            matrix: self.matrix.tensor(&other.matrix),
        }
    }

    /// Reduced state on the kept tensor factors; trace is preserved.
    pub fn partial_trace(
        &self,
        dims: &[usize],
        keep: &[usize],
    ) -> Result<DensityMatrix, QmathError> {
        let reduced = self.matrix.matrix().partial_trace(dims, keep)?;
        DensityMatrix::from_cmatrix(reduced)
    }

    /// Convex mixture (1−w)·self + w·other.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> DensityMatrix {
        DensityMatrix {
            matrix: self.matrix.scale(1.0 - w).add(&other.matrix.scale(w)),
        }
    }
}

/// Finite POVM: PSD effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<HermitianMatrix>,
}

impl Povm {
    /// Full validation, including the no-zero-effect requirement placed on
    /// pointer observables.
    pub fn new(effects: Vec<HermitianMatrix>) -> Result<Self, QmathError> {
        let povm = Povm::measurement(effects)?;
        for (index, e) in povm.effects.iter().enumerate() {
            if e.is_zero() {
                return Err(QmathError::ZeroEffect { index });
            }
        }
        Ok(povm)
    }

    /// Measurement-grade validation: PSD effects summing to identity. Zero
    /// effects are tolerated here because optimal discrimination measurements
    /// legitimately drop outcomes.
    pub fn measurement(effects: Vec<HermitianMatrix>) -> Result<Self, QmathError> {
        if effects.is_empty() {
            return Err(QmathError::EmptyPovm);
        }
        let dim = effects[0].dim();
        let mut sum = CMatrix::zeros(dim);
        for (index, e) in effects.iter().enumerate() {
            if e.dim() != dim {
                return Err(QmathError::EffectDimMismatch {
                    index,
                    expected: dim,
                    found: e.dim(),
                });
            }
            let min_eig = e.min_eigenvalue();
            if min_eig < -tol::STRUCTURAL {
                return Err(QmathError::EffectNotPsd { index, min_eig });
            }
            sum = sum.add(e.matrix());
        }
        let defect = sum.max_abs_diff(&CMatrix::identity(dim));
        if defect > tol::STRUCTURAL {
            return Err(QmathError::EffectsSumNotIdentity { defect });
        }
        Ok(Povm { effects })
    }

    /// Rank-one projective measurement onto an orthonormal basis given as
    /// columns of `basis`.
    pub fn projective(basis: &CMatrix) -> Result<Self, QmathError> {
        let dim = basis.dim();
        let mut effects = Vec::with_capacity(dim);
        for k in 0..dim {
            let col: Vec<C64> = (0..dim).map(|i| basis[(i, k)]).collect();
            effects.push(HermitianMatrix::new(CMatrix::projector(&col))?);
        }
        Povm::new(effects)
    }

    /// Projectors onto the computational basis.
    pub fn computational(dim: usize) -> Self {
        Povm::projective(&CMatrix::identity(dim)).expect("computational basis is orthonormal")
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn effects(&self) -> &[HermitianMatrix] {
        &self.effects
    }

    pub fn effect(&self, k: usize) -> &HermitianMatrix {
        &self.effects[k]
    }

    /// Outcome distribution Tr[E_k ρ] for a state.
    pub fn outcome_distribution(&self, state: &DensityMatrix) -> Vec<f64> {
        self.effects
            .iter()
            .map(|e| e.pair(state.hermitian()).max(0.0))
            .collect()
    }
}
