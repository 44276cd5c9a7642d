//! Environment-as-witness dynamics in measure-and-prepare form.
//!
//! A channel is stored as the pairs (E_k, σ_k): a pointer POVM on the central
//! system and the states prepared on the retained environment fragment. The
//! canonical `broadcast` family copies a pointer basis into every observer's
//! fragment and then applies local depolarizing noise, interpolating from a
//! perfect record of the pointer label down to no record at all. Choi
//! matrices are derived on demand for channel-distance work.

mod finite_env;

pub use finite_env::{finite_env_channel, simulate_finite_env, FiniteEnvSpec};

use thiserror::Error;

use crate::qmath::{trace_norm, CMatrix, DensityMatrix, HermitianMatrix, Povm, QmathError, C64};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("input state has dimension {found}, channel expects {expected}")]
    InputDimension { expected: usize, found: usize },
    #[error("output dimension {output} does not factor as the product {product} of bob_dims")]
    BadFactorization { output: usize, product: usize },
    #[error("bob index {index} out of range (t = {t})")]
    BobIndex { index: usize, t: usize },
    #[error("pointer and prepared lists have different lengths ({pointer} vs {prepared})")]
    LengthMismatch { pointer: usize, prepared: usize },
    #[error("prepared state {index} has dimension {found}, expected {expected}")]
    PreparedDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("broadcast spec invalid: {0}")]
    BadBroadcastSpec(String),
    #[error("finite environment spec invalid: {0}")]
    BadFiniteEnvSpec(String),
    #[error("Choi matrix invalid: {0}")]
    BadChoi(String),
    #[error(transparent)]
    Qmath(#[from] QmathError),
}

/// Measure-and-prepare channel ρ ↦ Σ_k Tr[E_k ρ]·σ_k.
#[derive(Debug, Clone)]
pub struct MeasureAndPrepareChannel {
    pointer: Povm,
    prepared: Vec<DensityMatrix>,
}

impl MeasureAndPrepareChannel {
    pub fn new(pointer: Povm, prepared: Vec<DensityMatrix>) -> Result<Self, ChannelError> {
        if pointer.len() != prepared.len() {
            return Err(ChannelError::LengthMismatch {
                pointer: pointer.len(),
                prepared: prepared.len(),
            });
        }
        let out_dim = prepared[0].dim();
        for (index, s) in prepared.iter().enumerate() {
            if s.dim() != out_dim {
                return Err(ChannelError::PreparedDimension {
                    index,
                    expected: out_dim,
                    found: s.dim(),
                });
            }
        }
        Ok(MeasureAndPrepareChannel { pointer, prepared })
    }

    pub fn pointer(&self) -> &Povm {
        &self.pointer
    }

    pub fn prepared(&self) -> &[DensityMatrix] {
        &self.prepared
    }

    /// Number of pointer outcomes k_max.
    pub fn outcome_count(&self) -> usize {
        self.pointer.len()
    }

    /// Dimension of the central system the pointer POVM acts on.
    pub fn input_dim(&self) -> usize {
        self.pointer.dim()
    }

    /// Shared dimension of the prepared states.
    pub fn output_dim(&self) -> usize {
        self.prepared[0].dim()
    }

    /// Applies the channel: Σ_k Tr[E_k ρ]·σ_k.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix, ChannelError> {
        if rho.dim() != self.input_dim() {
            return Err(ChannelError::InputDimension {
                expected: self.input_dim(),
                found: rho.dim(),
            });
        }
        let probs = self.pointer.outcome_distribution(rho);
        let mut acc = CMatrix::zeros(self.output_dim());
        for (p, sigma) in probs.iter().zip(&self.prepared) {
            if *p > 0.0 {
                acc = acc.add(&sigma.matrix().scale_re(*p));
            }
        }
        Ok(DensityMatrix::from_cmatrix(acc)?)
    }

    /// Pointer distribution Tr[E_k ρ] induced by a system state.
    pub fn pointer_distribution(&self, rho: &DensityMatrix) -> Result<Vec<f64>, ChannelError> {
        if rho.dim() != self.input_dim() {
            return Err(ChannelError::InputDimension {
                expected: self.input_dim(),
                found: rho.dim(),
            });
        }
        Ok(self.pointer.outcome_distribution(rho))
    }

    /// Restriction to observer `j`: same pointer, prepared states reduced by
    /// a partial trace onto the j-th tensor factor.
    pub fn reduce_to_bob(
        &self,
        bob_dims: &[usize],
        j: usize,
    ) -> Result<MeasureAndPrepareChannel, ChannelError> {
        let product: usize = bob_dims.iter().product();
        if product != self.output_dim() {
            return Err(ChannelError::BadFactorization {
                output: self.output_dim(),
                product,
            });
        }
        if j >= bob_dims.len() {
            return Err(ChannelError::BobIndex {
                index: j,
                t: bob_dims.len(),
            });
        }
        let prepared = self
            .prepared
            .iter()
            .map(|s| s.partial_trace(bob_dims, &[j]))
            .collect::<Result<Vec<_>, _>>()?;
        MeasureAndPrepareChannel::new(self.pointer.clone(), prepared)
    }

    /// Choi matrix J = (1/d)·Σ_k E_kᵀ ⊗ σ_k.
    pub fn choi(&self) -> ChoiMatrix {
        let d = self.input_dim();
        let mut acc = CMatrix::zeros(d * self.output_dim());
        for (e, sigma) in self.pointer.effects().iter().zip(&self.prepared) {
            let block = e.matrix().transpose().kron(sigma.matrix());
            acc = acc.add(&block);
        }
        ChoiMatrix::new(acc.scale_re(1.0 / d as f64), d, self.output_dim())
            .expect("measure-and-prepare Choi matrix is valid by construction")
    }
}

/// Normalized Choi matrix of a channel: J = (1/d_in)·Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|).
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    d_in: usize,
    d_out: usize,
    matrix: HermitianMatrix,
}

impl ChoiMatrix {
    /// Validates Hermiticity, positivity, unit trace, and trace preservation
    /// (input marginal = I/d_in within 1e-9).
    pub fn new(matrix: CMatrix, d_in: usize, d_out: usize) -> Result<Self, ChannelError> {
        if matrix.dim() != d_in * d_out {
            return Err(ChannelError::BadChoi(format!(
                "dimension {} is not d_in*d_out = {}",
                matrix.dim(),
                d_in * d_out
            )));
        }
        let herm =
            HermitianMatrix::new(matrix).map_err(|e| ChannelError::BadChoi(e.to_string()))?;
        if (herm.trace() - 1.0).abs() > 1e-9 {
            return Err(ChannelError::BadChoi(format!(
                "trace = {:.12}, expected 1",
                herm.trace()
            )));
        }
        let psd_ok = if herm.dim() <= crate::qmath::tol::DENSE_EIG_DIM {
            herm.min_eigenvalue() >= -1e-9
        } else {
            crate::qmath::cholesky_psd(herm.matrix(), 1e-9)
        };
        if !psd_ok {
            return Err(ChannelError::BadChoi("not positive semidefinite".into()));
        }
        let marginal = herm
            .matrix()
            .partial_trace(&[d_in, d_out], &[0])
            .map_err(|e| ChannelError::BadChoi(e.to_string()))?;
        let target = CMatrix::identity(d_in).scale_re(1.0 / d_in as f64);
        let defect = marginal.max_abs_diff(&target);
        if defect > 1e-9 {
            return Err(ChannelError::BadChoi(format!(
                "input marginal deviates from I/d by {defect:.3e} (not trace-preserving)"
            )));
        }
        Ok(ChoiMatrix {
            d_in,
            d_out,
            matrix: herm,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.d_in
    }

    pub fn output_dim(&self) -> usize {
        self.d_out
    }

    pub fn matrix(&self) -> &CMatrix {
        self.matrix.matrix()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.matrix
    }

    /// Reconstructs the channel action from the Choi matrix:
    /// Φ(ρ) = d_in·Σ_ij ρ_ij·J[(i,·),(j,·)].
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix, ChannelError> {
        Ok(DensityMatrix::from_cmatrix(
            self.apply_matrix(rho.matrix())?,
        )?)
    }

    /// Same contraction for an arbitrary (not necessarily PSD) input.
    pub fn apply_matrix(&self, rho: &CMatrix) -> Result<CMatrix, ChannelError> {
        if rho.dim() != self.d_in {
            return Err(ChannelError::InputDimension {
                expected: self.d_in,
                found: rho.dim(),
            });
        }
        let d_out = self.d_out;
        let mut out = CMatrix::zeros(d_out);
        let j = self.matrix.matrix();
        for i in 0..self.d_in {
            for jj in 0..self.d_in {
                let w = rho[(i, jj)];
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                for a in 0..d_out {
                    for b in 0..d_out {
                        out[(a, b)] += w * j[(i * d_out + a, jj * d_out + b)];
                    }
                }
            }
        }
        Ok(out.scale_re(self.d_in as f64))
    }

    /// Entrywise difference as a Hermitian matrix (for norm work).
    pub fn diff(&self, other: &ChoiMatrix) -> HermitianMatrix {
        self.matrix.sub(&other.matrix)
    }
}

/// Canonical broadcast family: pointer-basis measurement on the system, a
/// basis-state copy sent to each of `t` observers, each copy independently
/// depolarized with strength `noise`.
#[derive(Debug, Clone)]
pub struct BroadcastSpec {
    pub d_a: usize,
    pub t: usize,
    pub bob_dims: Vec<usize>,
    pub noise: f64,
    /// Orthonormal pointer basis as matrix columns.
    pub pointer_basis: CMatrix,
}

impl BroadcastSpec {
    /// Computational pointer basis, each observer a copy of the system space.
    pub fn symmetric(d_a: usize, t: usize, noise: f64) -> Self {
        BroadcastSpec {
            d_a,
            t,
            bob_dims: vec![d_a; t],
            noise,
            pointer_basis: CMatrix::identity(d_a),
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.t < 1 {
            return Err(ChannelError::BadBroadcastSpec("t must be ≥ 1".into()));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(ChannelError::BadBroadcastSpec(format!(
                "noise {} outside [0,1]",
                self.noise
            )));
        }
        if self.bob_dims.len() != self.t {
            return Err(ChannelError::BadBroadcastSpec(format!(
                "bob_dims has {} entries, expected t = {}",
                self.bob_dims.len(),
                self.t
            )));
        }
        if let Some(j) = self.bob_dims.iter().position(|&d| d < self.d_a) {
            return Err(ChannelError::BadBroadcastSpec(format!(
                "bob {} has dimension {} < d_A = {}; cannot hold a basis copy",
                j, self.bob_dims[j], self.d_a
            )));
        }
        if self.pointer_basis.dim() != self.d_a {
            return Err(ChannelError::BadBroadcastSpec(
                "pointer basis dimension mismatch".into(),
            ));
        }
        let gram = self.pointer_basis.adjoint().matmul(&self.pointer_basis);
        let defect = gram.max_abs_diff(&CMatrix::identity(self.d_a));
        if defect > 1e-10 {
            return Err(ChannelError::BadBroadcastSpec(format!(
                "pointer basis not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(())
    }
}

/// Depolarizing map D_ν(ρ) = (1−ν)·ρ + ν·I/d.
pub fn depolarize(rho: &DensityMatrix, noise: f64) -> DensityMatrix {
    rho.mix(&DensityMatrix::maximally_mixed(rho.dim()), noise)
}

/// Builds the broadcast channel of a [`BroadcastSpec`].
pub fn make_broadcast(spec: &BroadcastSpec) -> Result<MeasureAndPrepareChannel, ChannelError> {
    spec.validate()?;
    let pointer = Povm::projective(&spec.pointer_basis)?;
    let mut prepared = Vec::with_capacity(spec.d_a);
    for k in 0..spec.d_a {
        let mut sigma: Option<DensityMatrix> = None;
        for &dim in &spec.bob_dims {
            let local = depolarize(&DensityMatrix::basis_state(dim, k), spec.noise);
            sigma = Some(match sigma {
                None => local,
                Some(s) => s.tensor(&local),
            });
        }
        prepared.push(sigma.expect("t ≥ 1"));
    }
    MeasureAndPrepareChannel::new(pointer, prepared)
}

/// One detected violation of the spectrum-broadcast structure.
#[derive(Debug, Clone)]
pub struct SsbViolation {
    pub description: String,
}

/// Result of testing a joint system∪environment channel for spectrum
/// broadcast structure.
#[derive(Debug, Clone)]
pub struct SsbReport {
    pub is_ssb: bool,
    pub violations: Vec<SsbViolation>,
}

/// Tests whether a joint channel (outputs on A ⊗ B_1 ⊗ … ⊗ B_r) has spectrum
/// broadcast structure: every prepared state factors as |k⟩⟨k| ⊗ ⊗_j σ_k^{B_j}
/// with the per-observer encodings pairwise disjoint in support.
pub fn is_ssb_form(
    pointer_basis: &CMatrix,
    joint: &MeasureAndPrepareChannel,
    env_dims: &[usize],
    tol: f64,
) -> Result<SsbReport, ChannelError> {
    let d_a = joint.input_dim();
    let mut violations = Vec::new();
    if pointer_basis.dim() != d_a {
        return Err(ChannelError::BadBroadcastSpec(
            "pointer basis dimension mismatch".into(),
        ));
    }
    let env_product: usize = env_dims.iter().product();
    if d_a * env_product != joint.output_dim() {
        return Err(ChannelError::BadFactorization {
            output: joint.output_dim(),
            product: d_a * env_product,
        });
    }
    if joint.outcome_count() != d_a {
        violations.push(SsbViolation {
            description: format!(
                "pointer has {} outcomes, expected a rank-1 basis measurement with {}",
                joint.outcome_count(),
                d_a
            ),
        });
    }

    // Pointer effects must be the projectors onto the declared basis.
    for (k, e) in joint.pointer().effects().iter().enumerate() {
        let col: Vec<C64> = (0..d_a).map(|i| pointer_basis[(i, k)]).collect();
        let proj = CMatrix::projector(&col);
        let defect = e.matrix().max_abs_diff(&proj);
        if defect > tol {
            violations.push(SsbViolation {
                description: format!(
                    "pointer effect {k} deviates from the basis projector by {defect:.3e}"
                ),
            });
        }
    }

    let mut full_dims = Vec::with_capacity(env_dims.len() + 1);
    full_dims.push(d_a);
    full_dims.extend_from_slice(env_dims);

    let mut per_bob: Vec<Vec<DensityMatrix>> = vec![Vec::new(); env_dims.len()];
    for (k, omega) in joint.prepared().iter().enumerate() {
        // System marginal must be the k-th pointer projector.
        let sys = omega.matrix().partial_trace(&full_dims, &[0])?;
        let col: Vec<C64> = (0..d_a).map(|i| pointer_basis[(i, k)]).collect();
        let proj = CMatrix::projector(&col);
        let defect = sys.max_abs_diff(&proj);
        if defect > tol {
            violations.push(SsbViolation {
                description: format!(
                    "prepared state {k}: system part deviates from pointer projector by {defect:.3e}"
                ),
            });
        }

        // Full product structure |k⟩⟨k| ⊗ ⊗_j σ_k^{B_j}.
        let env_keep: Vec<usize> = (1..full_dims.len()).collect();
        let env_part = omega.matrix().partial_trace(&full_dims, &env_keep)?;
        let mut product = proj.clone();
        for (j, _) in env_dims.iter().enumerate() {
            let local = omega.matrix().partial_trace(&full_dims, &[j + 1])?;
            product = product.kron(&local);
            per_bob[j].push(
                DensityMatrix::from_cmatrix(local.clone())
                    .unwrap_or_else(|_| DensityMatrix::maximally_mixed(env_dims[j])),
            );
        }
        let factor_defect = omega.matrix().max_abs_diff(&product);
        if factor_defect > tol {
            violations.push(SsbViolation {
                description: format!(
                    "prepared state {k} does not factor across system and observers (defect {factor_defect:.3e})"
                ),
            });
        }
        let _ = env_part;
    }

    // Disjoint supports per observer: ‖σ_k σ_k'‖₁ ≤ tol for k ≠ k'.
    for (j, states) in per_bob.iter().enumerate() {
        for k in 0..states.len() {
            for kp in (k + 1)..states.len() {
                let overlap = product_trace_norm(states[k].matrix(), states[kp].matrix());
                if overlap > tol {
                    violations.push(SsbViolation {
                        description: format!(
                            "observer {j}: encodings {k} and {kp} share support (‖σ_k σ_k'‖₁ = {overlap:.3e})"
                        ),
                    });
                }
            }
        }
    }

    Ok(SsbReport {
        is_ssb: violations.is_empty(),
        violations,
    })
}

/// Trace norm of the (generally non-Hermitian) product A·B via the singular
/// values: ‖AB‖₁ = Σ√λ(B A² B) for Hermitian A, B.
pub fn product_trace_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    let ab = a.matmul(b);
    let gram = ab.adjoint().matmul(&ab).symmetrize();
    crate::qmath::eigh(&gram)
        .values
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum()
}

/// Unnormalized maximally entangled vector Σ_i |ii⟩ used by entangled probes.
pub fn unnormalized_max_entangled(d: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = C64::new(1.0, 0.0);
    }
    v
}

/// Perfect-record channel check helper: trace distance ½‖ρ − τ‖₁.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    0.5 * trace_norm(&a.matrix().sub(b.matrix()))
}
