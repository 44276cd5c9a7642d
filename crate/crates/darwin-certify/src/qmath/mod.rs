//! Complex Hermitian linear algebra and quantum-state primitives shared by
//! every other module: validated matrices, POVMs, Kronecker products, partial
//! traces, and a dense Hermitian eigensolver.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so everything here is safe to share across threads.

mod cmatrix;
mod eigen;
mod types;

pub use cmatrix::{basis_ket, normalize, vec_norm, CMatrix, C64};
pub use eigen::{
    abs_part, cholesky_psd, eigh, max_eigen, min_eigen, negative_part, pinv_sqrt, positive_part,
    sqrt_psd, trace_norm, EigenDecomposition,
};
pub use types::{tol, DensityMatrix, HermitianMatrix, Povm};

use thiserror::Error;

/// Errors from constructing or combining quantum-state primitives.
#[derive(Debug, Error)]
pub enum QmathError {
    #[error("matrix is not Hermitian (max |a_ij - conj(a_ji)| = {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("trace deviates from 1 (trace = {trace:.12})")]
    NotUnitTrace { trace: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eig:.3e})")]
    NotPsd { min_eig: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("partial trace requires a non-empty keep set")]
    EmptyKeepSet,
    #[error("keep indices must be ascending and unique")]
    UnsortedKeepSet,
    #[error("factor index {index} out of range or repeated")]
    BadFactorIndex { index: usize },
    #[error("POVM has no effects")]
    EmptyPovm,
    #[error("effect {index} has dimension {found}, expected {expected}")]
    EffectDimMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("effect {index} is not positive semidefinite (min eigenvalue = {min_eig:.3e})")]
    EffectNotPsd { index: usize, min_eig: f64 },
    #[error("effects do not sum to identity (max entry deviation = {defect:.3e})")]
    EffectsSumNotIdentity { defect: f64 },
    #[error("effect {index} is the zero matrix")]
    ZeroEffect { index: usize },
}
