//! Dense square complex matrices, row-major storage.
//!
//! Everything in this crate operates on small Hilbert spaces (dim ≤ 64 for
//! spectral work), so all routines are plain cubic-cost dense algorithms.

use num_complex::Complex;

use super::QmathError;

/// Complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Square complex matrix with row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix entry by entry from a closure over (row, col).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Constructs from a row-major slice; length must be a perfect square.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self, QmathError> {
        if data.len() != dim * dim {
            return Err(QmathError::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(CMatrix { dim, data })
    }

    /// Rank-one projector |v⟩⟨v| / ⟨v|v⟩.
    pub fn projector(v: &[C64]) -> Self {
        let n2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        CMatrix::from_fn(v.len(), |i, j| v[i] * v[j].conj() / n2)
    }

    /// Outer product |a⟩⟨b| (no normalization).
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        assert_eq!(a.len(), b.len());
        CMatrix::from_fn(a.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        CMatrix::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        CMatrix::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &CMatrix) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch in add");
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch in sub");
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch in matmul");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product A·v.
    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Hilbert–Schmidt inner product ⟨A, B⟩ = Tr[A†B].
    pub fn hs_inner(&self, other: &CMatrix) -> C64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from Hermiticity, max |a_ij − conj(a_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// (A + A†)/2, exactly Hermitian on output.
    pub fn symmetrize(&self) -> Self {
        let n = self.dim;
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let v = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        m
    }

    /// Kronecker product, self ⊗ other.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let (da, db) = (self.dim, other.dim);
        let mut out = CMatrix::zeros(da * db);
        for i1 in 0..da {
            for j1 in 0..da {
                let a = self[(i1, j1)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for i2 in 0..db {
                    for j2 in 0..db {
                        out[(i1 * db + i2, j1 * db + j2)] = a * other[(i2, j2)];
                    }
                }
            }
        }
        out
    }

    /// Partial trace over the factors *not* listed in `keep`.
    ///
    /// `dims` are the tensor-factor dimensions (their product must equal the
    /// matrix dimension); `keep` lists factor indices to retain, in ascending
    /// order. The output dimension is the product of the kept dimensions.
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<CMatrix, QmathError> {
        let total: usize = dims.iter().product();
        if total != self.dim {
            return Err(QmathError::DimensionMismatch {
                expected: self.dim,
                found: total,
            });
        }
        if keep.is_empty() {
            return Err(QmathError::EmptyKeepSet);
        }
        let mut seen = vec![false; dims.len()];
        for &k in keep {
            if k >= dims.len() || seen[k] {
                return Err(QmathError::BadFactorIndex { index: k });
            }
            seen[k] = true;
        }
        if keep.windows(2).any(|w| w[0] > w[1]) {
            return Err(QmathError::UnsortedKeepSet);
        }
        let traced: Vec<usize> = (0..dims.len()).filter(|f| !seen[*f]).collect();

        // Strides of each factor within the flat composite index.
        let mut strides = vec![1usize; dims.len()];
        for f in (0..dims.len().saturating_sub(1)).rev() {
            strides[f] = strides[f + 1] * dims[f + 1];
        }
        let offsets = |factors: &[usize]| -> Vec<usize> {
            let size: usize = factors.iter().map(|&f| dims[f]).product();
            let mut offs = vec![0usize; size];
            for (idx, off) in offs.iter_mut().enumerate() {
                let mut rem = idx;
                let mut acc = 0usize;
                for &f in factors.iter().rev() {
                    acc += (rem % dims[f]) * strides[f];
                    rem /= dims[f];
                }
                *off = acc;
            }
            offs
        };
        let keep_offs = offsets(keep);
        let tr_offs = offsets(&traced);

        let d_out = keep_offs.len();
        let mut out = CMatrix::zeros(d_out);
        for (a, &oa) in keep_offs.iter().enumerate() {
            for (b, &ob) in keep_offs.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for &ot in &tr_offs {
                    acc += self[(oa + ot, ob + ot)];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(out)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Computational basis column vector |k⟩.
pub fn basis_ket(dim: usize, k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[k] = C64::new(1.0, 0.0);
    v
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Normalizes a complex vector in place; no-op on the zero vector.
pub fn normalize(v: &mut [C64]) {
    let n = vec_norm(v);
    if n > 0.0 {
        for c in v.iter_mut() {
            *c /= n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_identities_compose() {
        let i2 = CMatrix::identity(2);
        assert_eq!(i2.kron(&i2), CMatrix::identity(4));
    }

    #[test]
    fn kron_basis_projectors() {
        let p0 = CMatrix::projector(&basis_ket(2, 0));
        let p1 = CMatrix::projector(&basis_ket(2, 1));
        let p01 = p0.kron(&p1);
        assert_eq!(p01, CMatrix::projector(&basis_ket(4, 1)));
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let a = CMatrix::from_fn(2, |i, j| c((i + 1) as f64, (j as f64) - 0.5));
        let a = a.symmetrize();
        let b = CMatrix::from_fn(3, |i, j| {
            c((i * j) as f64 + 1.0, 0.3 * i as f64 - 0.3 * j as f64)
        });
        let b = b.symmetrize();
        let ab = a.kron(&b);
        let got_a = ab.partial_trace(&[2, 3], &[0]).unwrap();
        let got_b = ab.partial_trace(&[2, 3], &[1]).unwrap();
        let tb = b.trace().re;
        let ta = a.trace().re;
        assert!(got_a.max_abs_diff(&a.scale_re(tb)) < 1e-12);
        assert!(got_b.max_abs_diff(&b.scale_re(ta)) < 1e-12);
    }

    #[test]
    fn partial_trace_composes_over_disjoint_factor_sets() {
        // Tracing factor 1 then factor 2 equals tracing {1,2} at once.
        let dims = [2usize, 2, 2];
        let m = CMatrix::from_fn(8, |i, j| c((i as f64 * 0.3).sin(), (j as f64 * 0.7).cos()))
            .symmetrize();
        let once = m.partial_trace(&dims, &[0]).unwrap();
        let first = m.partial_trace(&dims, &[0, 2]).unwrap();
        let then = first.partial_trace(&[2, 2], &[0]).unwrap();
        assert!(once.max_abs_diff(&then) < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = CMatrix::identity(4);
        assert!(m.partial_trace(&[3, 2], &[0]).is_err());
        assert!(m.partial_trace(&[2, 2], &[]).is_err());
        assert!(m.partial_trace(&[2, 2], &[2]).is_err());
    }

    #[test]
    fn hs_inner_matches_trace_form() {
        let a = CMatrix::from_fn(3, |i, j| c(i as f64, j as f64));
        let b = CMatrix::from_fn(3, |i, j| c((i + j) as f64, 1.0));
        let direct = a.adjoint().matmul(&b).trace();
        let fast = a.hs_inner(&b);
        assert!((direct - fast).norm() < 1e-12);
    }
}
