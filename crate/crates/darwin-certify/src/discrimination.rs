//! Minimum-error state discrimination and worst-case distinguishability.
//!
//! `p_guess` solves max_{POVM} Σ_k p_k·Tr[F_k σ_k] by a fixed-point iteration
//! on the optimality conditions, with a structure-rounding accelerator and a
//! projected dual certificate: the returned Y satisfies Y ⪰ p_k σ_k for all k,
//! so Tr[Y] upper-bounds the optimum and `gap = Tr[Y] − value` is an honest
//! error bar.
//!
//! `eta` minimizes p_guess over the central system's state. Because p_guess
//! is a maximum of functions linear in the pointer distribution, every solved
//! instance yields the global lower bound λ_min(Σ_k Tr[F_k σ_k]·E_k); the
//! minimization keeps all such cuts and solves the restricted saddle exactly
//! (a fully corrective variant of conditional gradient whose linear oracle is
//! `min_eigen` of the weighted pointer operator).

use thiserror::Error;

use crate::channels::{ChannelError, MeasureAndPrepareChannel};
use crate::qmath::{
    eigh, min_eigen, pinv_sqrt, trace_norm, CMatrix, DensityMatrix, HermitianMatrix, Povm,
    QmathError,
};
use crate::solvers::{minimax_state, SaddleOptions, SolverError};

#[derive(Debug, Error)]
pub enum DiscriminationError {
    #[error("priors and states have different lengths ({priors} vs {states})")]
    LengthMismatch { priors: usize, states: usize },
    #[error("priors must be nonnegative and sum to 1 (sum = {sum:.12})")]
    BadPriors { sum: f64 },
    #[error("states have mixed dimensions")]
    MixedDimensions,
    #[error("POVM for observer {bob} has {found} outcomes, expected {expected}")]
    OutcomeCountMismatch {
        bob: usize,
        expected: usize,
        found: usize,
    },
    #[error("POVM for observer {bob} acts on dimension {found}, expected {expected}")]
    LocalDimensionMismatch {
        bob: usize,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Qmath(#[from] QmathError),
}

/// States to discriminate together with their prior distribution.
#[derive(Debug, Clone)]
pub struct DiscriminationInstance {
    priors: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl DiscriminationInstance {
    pub fn new(priors: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self, DiscriminationError> {
        if priors.len() != states.len() || priors.is_empty() {
            return Err(DiscriminationError::LengthMismatch {
                priors: priors.len(),
                states: states.len(),
            });
        }
        let sum: f64 = priors.iter().sum();
        if priors.iter().any(|p| *p < -1e-12) || (sum - 1.0).abs() > 1e-12 {
            return Err(DiscriminationError::BadPriors { sum });
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(DiscriminationError::MixedDimensions);
        }
        Ok(DiscriminationInstance {
            priors: priors.iter().map(|p| p.max(0.0)).collect(),
            states,
        })
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.priors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// Weighted states p_k·σ_k.
    fn weighted(&self) -> Vec<CMatrix> {
        self.priors
            .iter()
            .zip(&self.states)
            .map(|(p, s)| s.matrix().scale_re(*p))
            .collect()
    }
}

/// Certified outcome of a discrimination solve.
#[derive(Debug, Clone)]
pub struct DiscriminationResult {
    /// Achieved guessing probability (primal feasible value).
    pub value: f64,
    /// POVM achieving `value`.
    pub povm: Povm,
    /// Feasible dual certificate: Y ⪰ p_k σ_k for every k.
    pub dual: HermitianMatrix,
    /// Tr[Y] − value ≥ 0; the optimum lies inside [value, value + gap].
    pub gap: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub struct PGuessOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub check_every: usize,
    /// Warm-start POVM effects (same outcome count and dimension).
    pub init: Option<Vec<CMatrix>>,
}

impl Default for PGuessOptions {
    fn default() -> Self {
        PGuessOptions {
            tol: 1e-9,
            max_iterations: 10_000,
            check_every: 25,
            init: None,
        }
    }
}

/// Optimal minimum-error discrimination with a dual certificate.
pub fn p_guess(instance: &DiscriminationInstance, tol: f64) -> DiscriminationResult {
    p_guess_with(
        instance,
        &PGuessOptions {
            tol,
            ..PGuessOptions::default()
        },
    )
}

pub fn p_guess_with(
    instance: &DiscriminationInstance,
    opts: &PGuessOptions,
) -> DiscriminationResult {
    let k_max = instance.len();
    let dim = instance.dim();
    let weighted = instance.weighted();

    let mut effects: Vec<CMatrix> = match &opts.init {
        Some(init) if init.len() == k_max && init.iter().all(|f| f.dim() == dim) => init.clone(),
        _ => vec![CMatrix::identity(dim).scale_re(1.0 / k_max as f64); k_max],
    };

    let mut best: Option<(f64, Vec<CMatrix>, HermitianMatrix, f64)> = None;
    let mut iterations = 0;

    for iter in 1..=opts.max_iterations {
        iterations = iter;
        // Fixed-point step: F_k ← G^{-1/2}·R_k F_k R_k·G^{-1/2} with
        // G = Σ_k R_k F_k R_k; the update preserves positivity and keeps the
        // POVM complete on the support of G.
        let sandwiched: Vec<CMatrix> = weighted
            .iter()
            .zip(&effects)
            .map(|(r, f)| r.matmul(f).matmul(r))
            .collect();
        let g = sandwiched
            .iter()
            .fold(CMatrix::zeros(dim), |acc, m| acc.add(m))
            .symmetrize();
        let top = eigh(&g).values.last().copied().unwrap_or(0.0).max(1e-300);
        let gih = pinv_sqrt(&g, top * 1e-14);
        for (f, m) in effects.iter_mut().zip(&sandwiched) {
            *f = gih.matmul(m).matmul(&gih).symmetrize();
        }

        let should_check = iter % opts.check_every == 0 || iter == opts.max_iterations;
        if !should_check {
            continue;
        }
        let (value, completed, dual, gap) = evaluate_povm(&effects, &weighted, instance);
        let improved = best
            .as_ref()
            .is_none_or(|(v, _, _, g)| value > *v || (value >= *v - 1e-15 && gap < *g));
        if improved {
            best = Some((value, completed, dual, gap));
        }
        if best.as_ref().is_some_and(|(_, _, _, g)| *g <= opts.tol) {
            break;
        }

        // Structure rounding: project onto the near-null spaces of Y − R_k
        // and renormalize; adopted only when it improves the primal.
        if iter % (opts.check_every * 4) == 0 {
            if let Some((v_best, _, dual_best, gap_best)) = &best {
                if let Some(rounded) = round_povm(dual_best, &weighted, *gap_best) {
                    let (rv, rc, rd, rg) = evaluate_povm(&rounded, &weighted, instance);
                    if rv > *v_best || rg < *gap_best {
                        effects = rounded;
                        best = Some((rv, rc, rd, rg));
                        if rg <= opts.tol {
                            break;
                        }
                    }
                }
            }
        }
    }

    let (value, completed, dual, gap) = best.expect("at least one evaluation ran");
    let povm_effects: Vec<HermitianMatrix> = completed
        .iter()
        .map(|f| {
            HermitianMatrix::new(f.clone())
                .expect("completed effects are Hermitian by construction")
        })
        .collect();
    let povm = Povm::measurement(povm_effects).expect("completed effects form a POVM");
    DiscriminationResult {
        value,
        povm,
        dual,
        gap,
        converged: gap <= opts.tol,
        iterations,
    }
}

/// Completes a POVM on the full space, computes its value, and builds a
/// feasible dual by shifting the symmetrized Lagrange operator.
fn evaluate_povm(
    effects: &[CMatrix],
    weighted: &[CMatrix],
    instance: &DiscriminationInstance,
) -> (f64, Vec<CMatrix>, HermitianMatrix, f64) {
    let dim = effects[0].dim();
    let mut completed: Vec<CMatrix> = effects.iter().map(clip_psd).collect();
    let sum = completed
        .iter()
        .fold(CMatrix::zeros(dim), |acc, f| acc.add(f));
    let remainder = clip_psd(&CMatrix::identity(dim).sub(&sum));
    let k_star = instance
        .priors()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(k, _)| k)
        .unwrap_or(0);
    completed[k_star] = completed[k_star].add(&remainder);
    // Exact completeness: fold any residual deviation into the last effect.
    let sum = completed
        .iter()
        .fold(CMatrix::zeros(dim), |acc, f| acc.add(f));
    let residue = CMatrix::identity(dim).sub(&sum);
    completed[k_star] = clip_psd(&completed[k_star].add(&residue));

    let value: f64 = completed
        .iter()
        .zip(weighted)
        .map(|(f, r)| f.hs_inner(r).re)
        .sum();

    let mut y = CMatrix::zeros(dim);
    for (f, r) in completed.iter().zip(weighted) {
        y = y.add(&r.matmul(f).add(&f.matmul(r)).scale_re(0.5));
    }
    let y = y.symmetrize();
    let mut worst = 0.0f64;
    for r in weighted {
        let lam = eigh(&y.sub(r)).values[0];
        worst = worst.min(lam);
    }
    let y_feas = if worst < 0.0 {
        y.add(&CMatrix::identity(dim).scale_re(-worst))
    } else {
        y
    };
    let dual = HermitianMatrix::new(y_feas).expect("dual certificate is Hermitian");
    let gap = dual.trace() - value;
    (value, completed, dual, gap)
}

/// Eigenvalue clip to the PSD cone (removes rounding dust).
fn clip_psd(m: &CMatrix) -> CMatrix {
    let dec = eigh(m);
    if dec.values[0] >= 0.0 {
        return m.symmetrize();
    }
    dec.map_values(|l| l.max(0.0))
}

/// Builds a candidate optimal POVM from the near-null spaces of Y − R_k.
fn round_povm(dual: &HermitianMatrix, weighted: &[CMatrix], gap: f64) -> Option<Vec<CMatrix>> {
    let dim = dual.dim();
    let threshold = gap.clamp(1e-13, 1e-3);
    let mut parts: Vec<CMatrix> = Vec::with_capacity(weighted.len());
    for r in weighted {
        let dec = eigh(&dual.matrix().sub(r));
        let mut p = CMatrix::zeros(dim);
        for (i, &lam) in dec.values.iter().enumerate() {
            if lam <= threshold {
                let v = dec.vector(i);
                p = p.add(&CMatrix::projector(&v));
            }
        }
        parts.push(p);
    }
    let total = parts
        .iter()
        .fold(CMatrix::zeros(dim), |acc, p| acc.add(p))
        .symmetrize();
    if total.max_abs() < 1e-12 {
        return None;
    }
    let tih = pinv_sqrt(&total, 1e-10);
    Some(
        parts
            .iter()
            .map(|p| tih.matmul(p).matmul(&tih).symmetrize())
            .collect(),
    )
}

/// Two-hypothesis optimum in closed form: ½·(1 + ‖p₀ρ₀ − p₁ρ₁‖₁).
pub fn helstrom_two(
    p0: f64,
    rho0: &DensityMatrix,
    p1: f64,
    rho1: &DensityMatrix,
) -> Result<f64, DiscriminationError> {
    if (p0 + p1 - 1.0).abs() > 1e-12 || p0 < -1e-12 || p1 < -1e-12 {
        return Err(DiscriminationError::BadPriors { sum: p0 + p1 });
    }
    if rho0.dim() != rho1.dim() {
        return Err(DiscriminationError::MixedDimensions);
    }
    let delta = rho0.matrix().scale_re(p0).sub(&rho1.matrix().scale_re(p1));
    Ok(0.5 * (1.0 + trace_norm(&delta)))
}

/// Square-root ("pretty good") measurement and its success probability.
/// A singular average state is handled by the pseudo-inverse on its support;
/// the orthogonal remainder is spread uniformly over the outcomes.
pub fn pgm(instance: &DiscriminationInstance) -> Result<(f64, Povm), DiscriminationError> {
    let dim = instance.dim();
    let k_max = instance.len();
    let weighted = instance.weighted();
    let avg = weighted
        .iter()
        .fold(CMatrix::zeros(dim), |acc, r| acc.add(r))
        .symmetrize();
    let top = eigh(&avg).values.last().copied().unwrap_or(0.0).max(1e-300);
    let isq = pinv_sqrt(&avg, top * 1e-13);
    let mut effects: Vec<CMatrix> = weighted
        .iter()
        .map(|r| isq.matmul(r).matmul(&isq).symmetrize())
        .collect();
    let sum = effects
        .iter()
        .fold(CMatrix::zeros(dim), |acc, f| acc.add(f));
    let remainder = clip_psd(&CMatrix::identity(dim).sub(&sum)).scale_re(1.0 / k_max as f64);
    for f in effects.iter_mut() {
        *f = f.add(&remainder);
    }
    let value = effects
        .iter()
        .zip(&weighted)
        .map(|(f, r)| f.hs_inner(r).re)
        .sum();
    let povm = Povm::measurement(
        effects
            .into_iter()
            .map(|f| HermitianMatrix::new(f).expect("PGM effects are Hermitian"))
            .collect(),
    )?;
    Ok((value, povm))
}

/// Certified worst-case distinguishability of an observer's channel.
#[derive(Debug, Clone)]
pub struct EtaResult {
    /// Midpoint of the certified bracket [lower, upper].
    pub eta: f64,
    /// Certified by an explicit measurement mixture: η ≥ lower.
    pub lower: f64,
    /// Certified by an explicit state: η ≤ upper.
    pub upper: f64,
    pub gap: f64,
    /// State achieving the upper bound (a worst case for discrimination).
    pub worst_state: DensityMatrix,
    pub converged: bool,
    pub iterations: usize,
    /// Optimal POVM solved at the worst state.
    pub worst_povm: Povm,
}

pub struct EtaOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub inner: PGuessOptions,
}

impl Default for EtaOptions {
    fn default() -> Self {
        EtaOptions {
            tol: 1e-7,
            max_iterations: 2_000,
            inner: PGuessOptions::default(),
        }
    }
}

/// η = min over system states of p_guess for one observer's channel.
pub fn eta(channel: &MeasureAndPrepareChannel, tol: f64) -> Result<EtaResult, DiscriminationError> {
    eta_with(
        channel,
        &EtaOptions {
            tol,
            ..EtaOptions::default()
        },
    )
}

pub fn eta_with(
    channel: &MeasureAndPrepareChannel,
    opts: &EtaOptions,
) -> Result<EtaResult, DiscriminationError> {
    let states = channel.prepared().to_vec();
    let pointer = channel.pointer();
    let d_a = channel.input_dim();

    let mut rho = DensityMatrix::maximally_mixed(d_a);
    let mut cuts: Vec<HermitianMatrix> = Vec::new();
    let mut upper = f64::INFINITY;
    let mut lower = 0.0f64;
    let mut worst_state = rho.clone();
    let mut worst_povm: Option<Povm> = None;
    let mut warm: Option<Vec<CMatrix>> = None;
    let mut iterations = 0;

    for iter in 1..=opts.max_iterations {
        iterations = iter;
        let mut priors = channel.pointer_distribution(&rho)?;
        let sum: f64 = priors.iter().sum();
        for p in priors.iter_mut() {
            *p = (*p / sum).max(0.0);
        }
        let instance = DiscriminationInstance::new(priors, states.clone())?;
        let inner_opts = PGuessOptions {
            tol: opts.inner.tol.min(opts.tol * 0.25),
            max_iterations: opts.inner.max_iterations,
            check_every: opts.inner.check_every,
            init: warm.take(),
        };
        let res = p_guess_with(&instance, &inner_opts);
        warm = Some(
            res.povm
                .effects()
                .iter()
                .map(|e| e.matrix().clone())
                .collect(),
        );

        let instance_upper = res.value + res.gap.max(0.0);
        if instance_upper < upper {
            upper = instance_upper;
            worst_state = rho.clone();
            worst_povm = Some(res.povm.clone());
        }

        // Global lower-bound cut from the solved POVM.
        let mut w = CMatrix::zeros(d_a);
        for (k, sigma) in states.iter().enumerate() {
            let c = res.povm.effect(k).pair(sigma.hermitian()).clamp(0.0, 1.0);
            if c > 0.0 {
                w = w.add(&pointer.effect(k).matrix().scale_re(c));
            }
        }
        let w = HermitianMatrix::new(w.symmetrize()).expect("cut operator is Hermitian");
        lower = lower.max(min_eigen(w.matrix()).0);
        let duplicate = cuts
            .iter()
            .any(|existing| existing.matrix().max_abs_diff(w.matrix()) < 1e-14);
        if !duplicate {
            cuts.push(w);
        }

        if upper - lower <= opts.tol {
            break;
        }

        // Restricted saddle over all collected cuts: its certified lower side
        // is attained by an explicit POVM mixture, its witness is the next
        // candidate worst state.
        let saddle_opts = SaddleOptions {
            tol: (opts.tol * 0.25).max(1e-12),
            ..SaddleOptions::default()
        };
        let master = minimax_state(&cuts, &saddle_opts)?;
        lower = lower.max(master.dual_value);
        if upper - lower <= opts.tol {
            break;
        }
        let next = master.witness;
        if duplicate && next.matrix().max_abs_diff(rho.matrix()) < 1e-12 {
            break;
        }
        rho = next;
    }

    let gap = (upper - lower).max(0.0);
    Ok(EtaResult {
        eta: 0.5 * (upper + lower),
        lower,
        upper,
        gap,
        worst_state,
        converged: gap <= opts.tol,
        iterations,
        worst_povm: worst_povm.expect("at least one instance solved"),
    })
}

/// Probability that every observer reports the encoded label, minimized over
/// the system state: λ_min(Σ_k c_k·E_k) with c_k = Tr[(⊗_j F_k^{B_j})·σ_k].
pub fn agreement_probability(
    channel: &MeasureAndPrepareChannel,
    bob_dims: &[usize],
    povms: &[Povm],
) -> Result<f64, DiscriminationError> {
    let product: usize = bob_dims.iter().product();
    if product != channel.output_dim() {
        return Err(ChannelError::BadFactorization {
            output: channel.output_dim(),
            product,
        }
        .into());
    }
    if povms.len() != bob_dims.len() {
        return Err(DiscriminationError::OutcomeCountMismatch {
            bob: povms.len(),
            expected: bob_dims.len(),
            found: povms.len(),
        });
    }
    let k_max = channel.outcome_count();
    for (j, povm) in povms.iter().enumerate() {
        if povm.len() != k_max {
            return Err(DiscriminationError::OutcomeCountMismatch {
                bob: j,
                expected: k_max,
                found: povm.len(),
            });
        }
        if povm.dim() != bob_dims[j] {
            return Err(DiscriminationError::LocalDimensionMismatch {
                bob: j,
                expected: bob_dims[j],
                found: povm.dim(),
            });
        }
    }

    let d_a = channel.input_dim();
    let mut op = CMatrix::zeros(d_a);
    for k in 0..k_max {
        let mut joint = povms[0].effect(k).matrix().clone();
        for povm in &povms[1..] {
            joint = joint.kron(povm.effect(k).matrix());
        }
        let c = joint.hs_inner(channel.prepared()[k].matrix()).re;
        if c != 0.0 {
            op = op.add(&channel.pointer().effect(k).matrix().scale_re(c));
        }
    }
    Ok(min_eigen(&op.symmetrize()).0)
}
