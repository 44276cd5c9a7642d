//! Finite-environment circuit simulation.
//!
//! A single system qubit couples to N environment qubits through controlled
//! rotations: conditioned on the system being |1⟩, environment qubit l turns
//! from |0⟩ to cos(θ_l)|0⟩ + sin(θ_l)|1⟩. At θ = π/2 every environment qubit
//! becomes a perfect copy of the system's basis label. The reduced dynamics
//! onto a retained fragment S_t is assembled exactly by driving each matrix
//! unit |i⟩⟨j| through the circuit as a pair of state vectors and contracting.

use crate::qmath::{CMatrix, DensityMatrix, Povm, C64};

use super::{ChannelError, ChoiMatrix, MeasureAndPrepareChannel};

/// Specification of the finite-environment circuit.
#[derive(Debug, Clone)]
pub struct FiniteEnvSpec {
    /// Central system dimension; only qubits (d_A = 2) are supported.
    pub d_a: usize,
    /// Environment qubit count, capped at 10 to bound state-vector cost.
    pub n: usize,
    /// Retained fragment: ascending indices into 0..n.
    pub s_t: Vec<usize>,
    /// Per-environment-qubit coupling angle in [0, π/2].
    pub coupling_angles: Vec<f64>,
}

impl FiniteEnvSpec {
    /// Uniform coupling angle across all environment qubits.
    pub fn uniform(n: usize, s_t: Vec<usize>, angle: f64) -> Self {
        FiniteEnvSpec {
            d_a: 2,
            n,
            s_t,
            coupling_angles: vec![angle; n],
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.d_a != 2 {
            return Err(ChannelError::BadFiniteEnvSpec(format!(
                "only qubit systems are supported (d_A = {})",
                self.d_a
            )));
        }
        if self.n == 0 || self.n > 10 {
            return Err(ChannelError::BadFiniteEnvSpec(format!(
                "environment size N = {} outside 1..=10 (state-vector cost cap)",
                self.n
            )));
        }
        if self.s_t.is_empty() || self.s_t.len() > self.n {
            return Err(ChannelError::BadFiniteEnvSpec(
                "fragment S_t must satisfy 1 ≤ |S_t| ≤ N".into(),
            ));
        }
        let mut seen = vec![false; self.n];
        for &i in &self.s_t {
            if i >= self.n || seen[i] {
                return Err(ChannelError::BadFiniteEnvSpec(format!(
                    "fragment index {i} out of range or repeated"
                )));
            }
            seen[i] = true;
        }
        if self.s_t.windows(2).any(|w| w[0] > w[1]) {
            return Err(ChannelError::BadFiniteEnvSpec(
                "fragment indices must be ascending".into(),
            ));
        }
        if self.coupling_angles.len() != self.n {
            return Err(ChannelError::BadFiniteEnvSpec(format!(
                "need one coupling angle per environment qubit ({} given, N = {})",
                self.coupling_angles.len(),
                self.n
            )));
        }
        if let Some(a) = self
            .coupling_angles
            .iter()
            .find(|a| !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(*a))
        {
            return Err(ChannelError::BadFiniteEnvSpec(format!(
                "coupling angle {a} outside [0, π/2]"
            )));
        }
        Ok(())
    }

    pub fn fragment_size(&self) -> usize {
        self.s_t.len()
    }
}

/// Runs the global circuit on basis input |k⟩_A ⊗ |0…0⟩ and returns the full
/// system+environment state vector (system qubit is the leading factor).
fn circuit_branch(spec: &FiniteEnvSpec, k: usize) -> Vec<C64> {
    let n_qubits = spec.n + 1;
    let dim = 1usize << n_qubits;
    let mut psi = vec![C64::new(0.0, 0.0); dim];
    // Basis index: system bit is most significant, environment bits follow.
    psi[k << spec.n] = C64::new(1.0, 0.0);

    for (l, &angle) in spec.coupling_angles.iter().enumerate() {
        let (c, s) = (angle.cos(), angle.sin());
        let sys_bit = 1usize << spec.n;
        let env_bit = 1usize << (spec.n - 1 - l);
        for idx in 0..dim {
            // Visit each (|…0_l…⟩, |…1_l…⟩) pair once, controlled on the
            // system bit being set.
            if idx & sys_bit == 0 || idx & env_bit != 0 {
                continue;
            }
            let lo = psi[idx];
            let hi = psi[idx | env_bit];
            psi[idx] = lo * c - hi * s;
            psi[idx | env_bit] = lo * s + hi * c;
        }
    }
    psi
}

/// Reduced operator Tr_{A, E∖S_t}[|ψ_i⟩⟨ψ_j|] contracted from two branches.
fn contract_onto_fragment(spec: &FiniteEnvSpec, psi_i: &[C64], psi_j: &[C64]) -> CMatrix {
    let n_factors = spec.n + 1;
    let dims = vec![2usize; n_factors];
    let keep: Vec<usize> = spec.s_t.iter().map(|&i| i + 1).collect();
    let traced: Vec<usize> = (0..n_factors).filter(|f| !keep.contains(f)).collect();

    let mut strides = vec![1usize; n_factors];
    for f in (0..n_factors - 1).rev() {
        strides[f] = strides[f + 1] * dims[f + 1];
    }
    let offsets = |factors: &[usize]| -> Vec<usize> {
        let size: usize = factors.iter().map(|&f| dims[f]).product();
        (0..size)
            .map(|idx| {
                let mut rem = idx;
                let mut acc = 0usize;
                for &f in factors.iter().rev() {
                    acc += (rem % dims[f]) * strides[f];
                    rem /= dims[f];
                }
                acc
            })
            .collect()
    };
    let keep_offs = offsets(&keep);
    let tr_offs = offsets(&traced);

    let d_out = keep_offs.len();
    let mut out = CMatrix::zeros(d_out);
    for (a, &oa) in keep_offs.iter().enumerate() {
        for (b, &ob) in keep_offs.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &ot in &tr_offs {
                acc += psi_i[oa + ot] * psi_j[ob + ot].conj();
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Simulates the circuit and assembles the Choi matrix of the reduced channel
/// Φ^{S_t} by probing all d_A² matrix units.
pub fn simulate_finite_env(spec: &FiniteEnvSpec) -> Result<ChoiMatrix, ChannelError> {
    spec.validate()?;
    let branches: Vec<Vec<C64>> = (0..spec.d_a).map(|k| circuit_branch(spec, k)).collect();
    let d_out = 1usize << spec.fragment_size();
    let mut choi = CMatrix::zeros(spec.d_a * d_out);
    for i in 0..spec.d_a {
        for j in 0..spec.d_a {
            let block = contract_onto_fragment(spec, &branches[i], &branches[j]);
            for a in 0..d_out {
                for b in 0..d_out {
                    choi[(i * d_out + a, j * d_out + b)] = block[(a, b)] / spec.d_a as f64;
                }
            }
        }
    }
    ChoiMatrix::new(choi, spec.d_a, d_out)
}

/// The same reduced dynamics in measure-and-prepare form: computational
/// pointer on the system, prepared states Φ^{S_t}(|k⟩⟨k|).
///
/// Tracing out the system kills every off-diagonal matrix unit, so this form
/// reproduces the circuit channel exactly (the two agree to rounding error).
pub fn finite_env_channel(spec: &FiniteEnvSpec) -> Result<MeasureAndPrepareChannel, ChannelError> {
    spec.validate()?;
    let pointer = Povm::computational(spec.d_a);
    let prepared = (0..spec.d_a)
        .map(|k| {
            let psi = circuit_branch(spec, k);
            DensityMatrix::from_cmatrix(contract_onto_fragment(spec, &psi, &psi))
        })
        .collect::<Result<Vec<_>, _>>()?;
    MeasureAndPrepareChannel::new(pointer, prepared)
}
