//! End-to-end certification runs behind the CLI subcommands.
//!
//! `certify` chains: channel construction → per-observer reduction → η with
//! certificates → cut-off P̂ → verdict → (on affine independence) model
//! construction, statistics replay, and export. `sweep` evaluates a scenario
//! family along one declared parameter, in parallel across grid points.
//! `ssb` detects spectrum-broadcast structure on a joint channel and runs the
//! automatic certification path it licenses.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{
    agreement_lower_bound, classical_objectivity_verdict, distinguishability_bound,
    finite_env_deviation_bound, projective_bound, BoundsError, CutoffResult, Verdict,
};
use crate::channels::{make_broadcast, BroadcastSpec, ChannelError, MeasureAndPrepareChannel};
use crate::contextuality::{contextuality_distance_bound, ContextualityError};
use crate::discrimination::{
    agreement_probability, eta_with, DiscriminationError, EtaOptions, EtaResult, PGuessOptions,
};
use crate::ontology::{
    build_nc_model, check_context_respect, effect_digest, export_model, verify_reproduction,
    OntologyError,
};
use crate::qmath::{DensityMatrix, Povm};
use crate::report::{
    AgreementBlock, BobBlock, CertificationReport, CutoffBlock, DeviationBlock, IndependenceBlock,
    ModelBlock, SweepRow, SweepTable,
};
use crate::scenario::{export_channel, DynamicsSpec, Scenario, ScenarioError};
use crate::simplex::{is_affinely_independent, SimplexError, StateFamily};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Discrimination(#[from] DiscriminationError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    Contextuality(#[from] ContextualityError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parameter {name} is not sweepable here: {reason}")]
    BadSweepParameter { name: String, reason: String },
    #[error(
        "scenario does not declare a joint system∪environment channel (missing \"ssb\" block)"
    )]
    MissingSsbDeclaration,
    #[error(
        "spectrum broadcast structure certified, yet observer {bob} has distinguishability upper bound {eta_upper} < 1; this indicates a solver bug"
    )]
    SsbConsistency { bob: usize, eta_upper: f64 },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Exit-status contract of the binary.
pub mod exit_codes {
    pub const EMERGED: i32 = 0;
    pub const NOT_CERTIFIED: i32 = 2;
    pub const MARGINAL: i32 = 3;
    pub const VALIDATION: i32 = 64;
    pub const INTERNAL: i32 = 70;
}

pub fn verdict_exit_code(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::Emerged => exit_codes::EMERGED,
        Verdict::NotCertified => exit_codes::NOT_CERTIFIED,
        Verdict::Marginal => exit_codes::MARGINAL,
    }
}

/// Common command configuration from CLI flags.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub seed_override: Option<u64>,
    pub tol_override: Option<f64>,
}

fn write_text(path: &Path, text: &str) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| PipelineError::Io {
                path: parent.display().to_string(),
                source,
            })?;
        }
    }
    std::fs::write(path, text).map_err(|source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn sibling(out: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "report".into());
    out.with_file_name(format!("{stem}{suffix}.{ext}"))
}

struct BobAnalysis {
    channel: MeasureAndPrepareChannel,
    eta: EtaResult,
    independence: IndependenceBlock,
}

fn analyze_bobs(
    channel: &MeasureAndPrepareChannel,
    bob_dims: &[usize],
    tolerances: &crate::scenario::Tolerances,
    tol_override: Option<f64>,
) -> Result<Vec<BobAnalysis>, PipelineError> {
    let tol_cert = tol_override.unwrap_or(tolerances.certificate);
    let mut out = Vec::with_capacity(bob_dims.len());
    for j in 0..bob_dims.len() {
        let bob_channel = channel.reduce_to_bob(bob_dims, j)?;
        let eta = eta_with(
            &bob_channel,
            &EtaOptions {
                tol: tol_cert,
                max_iterations: 2_000,
                inner: PGuessOptions {
                    tol: tolerances.solver,
                    ..PGuessOptions::default()
                },
            },
        )?;
        let family = StateFamily::new(bob_channel.prepared().to_vec())?;
        let rep = is_affinely_independent(&family, tolerances.rank);
        out.push(BobAnalysis {
            channel: bob_channel,
            eta,
            independence: IndependenceBlock {
                independent: rep.independent,
                rank: rep.rank,
                marginal: rep.marginal,
                singular_values: rep.singular_values,
            },
        });
    }
    Ok(out)
}

fn process_eta_bracket(bobs: &[BobAnalysis]) -> (f64, f64) {
    let lower = bobs
        .iter()
        .map(|b| b.eta.lower)
        .fold(f64::INFINITY, f64::min);
    let upper = bobs
        .iter()
        .map(|b| b.eta.upper)
        .fold(f64::INFINITY, f64::min);
    (lower, upper.max(lower))
}

/// Full certification of one scenario. When `out` is given, writes the JSON
/// report there plus a CSV twin, the built channel, and one model file per
/// observer whose encodings are affinely independent.
pub fn certify(
    scenario: &Scenario,
    config: &RunConfig,
    out: Option<&Path>,
) -> Result<CertificationReport, PipelineError> {
    scenario.validate()?;
    let (channel, bob_dims) = scenario.build_channel()?;
    let mut rng = scenario.rng(config.seed_override);
    let preparations = scenario.build_preparations(channel.input_dim(), &mut rng)?;
    let measurements = scenario.build_measurements(&bob_dims, &mut rng)?;
    let tol_cert = config
        .tol_override
        .unwrap_or(scenario.tolerances.certificate);

    let bobs = analyze_bobs(
        &channel,
        &bob_dims,
        &scenario.tolerances,
        config.tol_override,
    )?;
    let (eta_lower, eta_upper) = process_eta_bracket(&bobs);
    let process_eta = 0.5 * (eta_lower + eta_upper);
    let process_gap = eta_upper - eta_lower;

    let cutoff = distinguishability_bound(channel.pointer(), tol_cert)?;
    let combined = (
        0.5 * process_gap + 0.5 * tol_cert,
        0.5 * cutoff.gap + 0.5 * tol_cert,
    );
    let verdict = classical_objectivity_verdict(process_eta, &cutoff, combined);

    // Models for every observer whose hypothesis holds.
    let mut bob_blocks = Vec::with_capacity(bobs.len());
    for (j, bob) in bobs.iter().enumerate() {
        let model_block = if bob.independence.independent {
            let mut meas = measurements[j].clone();
            meas.push(bob.eta.worst_povm.clone());
            let model =
                build_nc_model(&bob.channel, &preparations, &meas, scenario.tolerances.rank)?;
            let reproduction = verify_reproduction(
                &model,
                &bob.channel,
                &preparations,
                &meas,
                scenario.tolerances.reproduction,
            )?;
            let context = check_context_respect(&model, scenario.tolerances.reproduction);
            let export_path = match out {
                Some(out_path) => {
                    let path = sibling(out_path, &format!("_model_bob{j}"), "json");
                    let doc = export_model(&model);
                    let mut text = serde_json::to_string_pretty(&doc).expect("model serializes");
                    text.push('\n');
                    write_text(&path, &text)?;
                    Some(path.display().to_string())
                }
                None => None,
            };
            Some(ModelBlock {
                export_path,
                reproduction_checked: reproduction.checked,
                reproduction_max_residual: reproduction.max_residual,
                reproduction_passed: reproduction.passed(),
                context_pairs_checked: context.pairs_checked,
                context_failures: context.failures.len(),
            })
        } else {
            None
        };
        bob_blocks.push(BobBlock {
            index: j,
            dim: bob_dims[j],
            eta: bob.eta.eta,
            eta_lower: bob.eta.lower,
            eta_upper: bob.eta.upper,
            eta_gap: bob.eta.gap,
            eta_converged: bob.eta.converged,
            worst_state_digest: effect_digest(bob.eta.worst_state.hermitian()),
            worst_pointer_distribution: channel
                .pointer()
                .outcome_distribution(&bob.eta.worst_state),
            independence: bob.independence.clone(),
            model: model_block,
        });
    }

    let optimal_povms: Vec<Povm> = bobs.iter().map(|b| b.eta.worst_povm.clone()).collect();
    let agreement = AgreementBlock {
        probability: agreement_probability(&channel, &bob_dims, &optimal_povms)?,
        lower_bound: agreement_lower_bound(bob_dims.len(), eta_lower),
    };

    let deviation = match &scenario.dynamics {
        DynamicsSpec::FiniteEnv { n, s_t, .. } => Some(finite_env_deviation_block(
            scenario,
            &bobs,
            &measurements,
            &preparations,
            *n,
            s_t.len(),
            tol_cert,
        )?),
        _ => None,
    };

    let channel_export_path = match out {
        Some(out_path) => {
            let path = sibling(out_path, "_channel", "json");
            let doc = export_channel(&channel, &bob_dims);
            let mut text = serde_json::to_string_pretty(&doc).expect("channel serializes");
            text.push('\n');
            write_text(&path, &text)?;
            Some(path.display().to_string())
        }
        None => None,
    };

    let report = CertificationReport {
        scenario: scenario.name.clone(),
        seed: config.seed_override.unwrap_or(scenario.seed),
        system_dim: channel.input_dim(),
        bob_dims: bob_dims.clone(),
        pointer_outcomes: channel.outcome_count(),
        process_eta,
        process_eta_lower: eta_lower,
        process_eta_upper: eta_upper,
        process_eta_gap: process_gap,
        cutoff: cutoff_block(&cutoff),
        verdict,
        combined_tolerance: combined.0 + combined.1,
        bobs: bob_blocks,
        agreement,
        deviation,
        channel_export_path,
    };

    if let Some(out_path) = out {
        write_text(out_path, &report.to_json())?;
        write_text(&out_path.with_extension("csv"), &report.to_csv())?;
    }
    Ok(report)
}

fn cutoff_block(cutoff: &CutoffResult) -> CutoffBlock {
    CutoffBlock {
        p_hat: cutoff.p_hat,
        maximin: cutoff.maximin,
        gap: cutoff.gap,
        converged: cutoff.converged,
        boundary: cutoff.boundary,
        optimal_weights: cutoff.optimal_weights.clone(),
        witness_state_digest: effect_digest(cutoff.witness_state.hermitian()),
    }
}

fn finite_env_deviation_block(
    scenario: &Scenario,
    bobs: &[BobAnalysis],
    measurements: &[Vec<Povm>],
    preparations: &[DensityMatrix],
    n: usize,
    t: usize,
    tol_cert: f64,
) -> Result<DeviationBlock, PipelineError> {
    // Per-observer comparison against the perfect-record channel; the block
    // reports the worst observer.
    let mut block: Option<DeviationBlock> = None;
    for (j, bob) in bobs.iter().enumerate() {
        let ideal = make_broadcast(&BroadcastSpec::symmetric(2, 1, 0.0))?;
        let deviation = contextuality_distance_bound(
            &bob.channel.choi(),
            &ideal,
            &measurements[j],
            preparations,
            tol_cert,
        )?;
        let candidate = DeviationBlock {
            bob: j,
            effect_constant: deviation.effect_constant,
            diamond_upper: deviation.diamond,
            diamond_lower: deviation.diamond_lower,
            diamond_gap: deviation.diamond_gap,
            l1_bound: deviation.bound,
            observed_l1: deviation.observed_l1,
            env_size_bound: finite_env_deviation_bound(2, t, n, scenario.deviation_delta)?,
            env_size_delta: scenario.deviation_delta,
            env_qubits: n,
        };
        let replace = block
            .as_ref()
            .is_none_or(|b| candidate.diamond_upper > b.diamond_upper);
        if replace {
            block = Some(candidate);
        }
    }
    Ok(block.expect("at least one observer"))
}

/// Sweepable scenario parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Noise,
    CouplingAngle,
    EnvironmentSize,
}

impl std::str::FromStr for SweepParameter {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "noise" => Ok(SweepParameter::Noise),
            "coupling_angle" => Ok(SweepParameter::CouplingAngle),
            "n" => Ok(SweepParameter::EnvironmentSize),
            other => Err(format!(
                "unknown parameter {other:?}; expected noise, coupling_angle, or n"
            )),
        }
    }
}

fn scenario_at(
    scenario: &Scenario,
    param: SweepParameter,
    value: f64,
) -> Result<Scenario, PipelineError> {
    let mut point = scenario.clone();
    match (&mut point.dynamics, param) {
        (DynamicsSpec::Broadcast { noise, .. }, SweepParameter::Noise) => {
            *noise = value;
        }
        (DynamicsSpec::FiniteEnv { coupling_angle, .. }, SweepParameter::CouplingAngle) => {
            *coupling_angle = crate::scenario::CouplingAngles::Uniform(value);
        }
        (DynamicsSpec::FiniteEnv { n, .. }, SweepParameter::EnvironmentSize) => {
            *n = value.round().max(1.0) as usize;
        }
        (_, p) => {
            return Err(PipelineError::BadSweepParameter {
                name: format!("{p:?}"),
                reason: "not a field of the declared dynamics".into(),
            });
        }
    }
    Ok(point)
}

fn sweep_point(
    scenario: &Scenario,
    config: &RunConfig,
    index: usize,
    value: f64,
) -> Result<SweepRow, PipelineError> {
    let (channel, bob_dims) = scenario.build_channel()?;
    let bobs = analyze_bobs(
        &channel,
        &bob_dims,
        &scenario.tolerances,
        config.tol_override,
    )?;
    let (lower, upper) = process_eta_bracket(&bobs);
    let tol_cert = config
        .tol_override
        .unwrap_or(scenario.tolerances.certificate);
    let cutoff = distinguishability_bound(channel.pointer(), tol_cert)?;
    let combined = (
        0.5 * (upper - lower) + 0.5 * tol_cert,
        0.5 * cutoff.gap + 0.5 * tol_cert,
    );
    let eta_mid = 0.5 * (lower + upper);
    let verdict = classical_objectivity_verdict(eta_mid, &cutoff, combined);
    let povms: Vec<Povm> = bobs.iter().map(|b| b.eta.worst_povm.clone()).collect();
    let agreement = agreement_probability(&channel, &bob_dims, &povms)?;
    let diamond_upper = match &scenario.dynamics {
        DynamicsSpec::FiniteEnv { .. } => {
            let ideal = make_broadcast(&BroadcastSpec::symmetric(2, 1, 0.0))?;
            let mut worst = 0.0f64;
            for bob in &bobs {
                let d = crate::contextuality::diamond_distance(
                    &bob.channel.choi(),
                    &ideal.choi(),
                    tol_cert,
                )?;
                worst = worst.max(d.upper);
            }
            Some(worst)
        }
        _ => None,
    };
    Ok(SweepRow {
        index,
        value,
        eta: eta_mid,
        eta_gap: upper - lower,
        p_hat: cutoff.p_hat,
        verdict,
        independent: bobs.iter().all(|b| b.independence.independent),
        marginal: bobs.iter().any(|b| b.independence.marginal),
        agreement,
        agreement_bound: agreement_lower_bound(bob_dims.len(), lower),
        diamond_upper,
    })
}

/// Evaluates the scenario along a parameter grid. Grid points run in
/// parallel; `DARWIN_CERTIFY_THREADS` caps the worker count.
pub fn sweep(
    scenario: &Scenario,
    config: &RunConfig,
    param: SweepParameter,
    from: f64,
    to: f64,
    steps: usize,
    out: Option<&Path>,
) -> Result<SweepTable, PipelineError> {
    scenario.validate()?;
    let steps = steps.max(1);
    let values: Vec<f64> = if steps == 1 {
        vec![from]
    } else {
        (0..steps)
            .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    // Validate the whole grid up front so failures carry the grid index.
    let points: Vec<Scenario> = values
        .iter()
        .map(|v| scenario_at(scenario, param, *v))
        .collect::<Result<_, _>>()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep_threads())
        .build()
        .map_err(|e| PipelineError::ThreadPool(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, point)| sweep_point(point, config, i, values[i]))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let crossing = SweepTable::compute_crossing(&rows);
    let table = SweepTable {
        parameter: format!("{param:?}"),
        rows,
        crossing,
    };
    if let Some(path) = out {
        write_text(path, &table.to_csv())?;
    }
    Ok(table)
}

fn sweep_threads() -> usize {
    std::env::var("DARWIN_CERTIFY_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SsbBobBlock {
    pub index: usize,
    pub dim: usize,
    pub eta: f64,
    pub eta_gap: f64,
    pub reproduction_max_residual: f64,
    pub reproduction_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_path: Option<String>,
}

/// Result of the spectrum-broadcast-structure command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SsbCommandReport {
    pub scenario: String,
    pub is_ssb: bool,
    pub violations: Vec<String>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_hat: Option<f64>,
    /// Cross-check of the closed-form P̂ against the maximin solver.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_hat_solver: Option<f64>,
    pub bobs: Vec<SsbBobBlock>,
}

impl SsbCommandReport {
    pub fn to_json(&self) -> String {
        let mut doc = self.clone();
        doc.p_hat = doc.p_hat.map(crate::ontology::round_sig12);
        doc.p_hat_solver = doc.p_hat_solver.map(crate::ontology::round_sig12);
        for bob in doc.bobs.iter_mut() {
            bob.eta = crate::ontology::round_sig12(bob.eta);
            bob.eta_gap = crate::ontology::round_sig12(bob.eta_gap);
            bob.reproduction_max_residual =
                crate::ontology::round_sig12(bob.reproduction_max_residual);
        }
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        text
    }
}

/// Detects spectrum-broadcast structure on a joint channel and, when present,
/// certifies objectivity along the automatic path: η = 1 for every observer
/// (including the system copy), P̂ = 1 − 1/(2d_A), models for all observers.
pub fn ssb(
    scenario: &Scenario,
    config: &RunConfig,
    out: Option<&Path>,
) -> Result<SsbCommandReport, PipelineError> {
    scenario.validate()?;
    let declaration = scenario
        .ssb
        .as_ref()
        .ok_or(PipelineError::MissingSsbDeclaration)?;
    let (channel, _dims) = scenario.build_channel()?;
    let d_a = channel.input_dim();
    let basis = match &declaration.pointer_basis {
        Some(m) => m.to_cmatrix("ssb.pointer_basis")?,
        None => crate::qmath::CMatrix::identity(d_a),
    };
    let structure =
        crate::channels::is_ssb_form(&basis, &channel, &declaration.env_dims, declaration.tol)?;
    if !structure.is_ssb {
        return Ok(SsbCommandReport {
            scenario: scenario.name.clone(),
            is_ssb: false,
            violations: structure
                .violations
                .iter()
                .map(|v| v.description.clone())
                .collect(),
            verdict: Verdict::NotCertified,
            p_hat: None,
            p_hat_solver: None,
            bobs: Vec::new(),
        });
    }

    // Joint factors: the system copy is observer 0, environment follows.
    let mut joint_dims = Vec::with_capacity(declaration.env_dims.len() + 1);
    joint_dims.push(d_a);
    joint_dims.extend_from_slice(&declaration.env_dims);

    let mut rng = scenario.rng(config.seed_override);
    let preparations = scenario.build_preparations(d_a, &mut rng)?;
    let measurements = scenario.build_measurements(&joint_dims, &mut rng)?;
    let bobs = analyze_bobs(
        &channel,
        &joint_dims,
        &scenario.tolerances,
        config.tol_override,
    )?;

    let tol_cert = config
        .tol_override
        .unwrap_or(scenario.tolerances.certificate);
    // Spectrum broadcast structure guarantees perfectly distinguishable
    // encodings; a distinguishability certificate below 1 is a solver bug,
    // not a property of the input.
    for (j, bob) in bobs.iter().enumerate() {
        if bob.eta.upper < 1.0 - 10.0 * tol_cert {
            return Err(PipelineError::SsbConsistency {
                bob: j,
                eta_upper: bob.eta.upper,
            });
        }
    }
    let cutoff = distinguishability_bound(channel.pointer(), tol_cert)?;
    let p_hat_closed = projective_bound(d_a);
    let (lower, upper) = process_eta_bracket(&bobs);
    let combined = (
        0.5 * (upper - lower) + 0.5 * tol_cert,
        0.5 * cutoff.gap + 0.5 * tol_cert,
    );
    let verdict = classical_objectivity_verdict(0.5 * (lower + upper), &cutoff, combined);

    let mut bob_blocks = Vec::with_capacity(bobs.len());
    for (j, bob) in bobs.iter().enumerate() {
        let mut meas = measurements[j].clone();
        meas.push(bob.eta.worst_povm.clone());
        let model = build_nc_model(&bob.channel, &preparations, &meas, scenario.tolerances.rank)?;
        let reproduction = verify_reproduction(
            &model,
            &bob.channel,
            &preparations,
            &meas,
            scenario.tolerances.reproduction,
        )?;
        let model_path = match out {
            Some(out_path) => {
                let path = sibling(out_path, &format!("_model_bob{j}"), "json");
                let doc = export_model(&model);
                let mut text = serde_json::to_string_pretty(&doc).expect("model serializes");
                text.push('\n');
                write_text(&path, &text)?;
                Some(path.display().to_string())
            }
            None => None,
        };
        bob_blocks.push(SsbBobBlock {
            index: j,
            dim: joint_dims[j],
            eta: bob.eta.eta,
            eta_gap: bob.eta.gap,
            reproduction_max_residual: reproduction.max_residual,
            reproduction_checked: reproduction.checked,
            model_path,
        });
    }

    let report = SsbCommandReport {
        scenario: scenario.name.clone(),
        is_ssb: true,
        violations: Vec::new(),
        verdict,
        p_hat: Some(p_hat_closed),
        p_hat_solver: Some(cutoff.p_hat),
        bobs: bob_blocks,
    };
    if let Some(path) = out {
        write_text(path, &report.to_json())?;
    }
    Ok(report)
}

/// Loads and validates a scenario, returning a one-line summary.
pub fn validate(path: &Path) -> Result<String, PipelineError> {
    let scenario = Scenario::load(path)?;
    let (channel, bob_dims) = scenario.build_channel()?;
    Ok(format!(
        "{}: d_A={}, observers={:?}, pointer outcomes={}, seed={}",
        scenario.name,
        channel.input_dim(),
        bob_dims,
        channel.outcome_count(),
        scenario.seed
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{MeasurementsSpec, PreparationsSpec, Tolerances};

    fn broadcast_scenario(noise: f64, t: usize) -> Scenario {
        Scenario {
            name: format!("broadcast_noise_{noise}"),
            seed: 0,
            dynamics: DynamicsSpec::Broadcast {
                d_a: 2,
                t,
                noise,
                bob_dims: None,
                pointer_basis: None,
            },
            preparations: PreparationsSpec::Random { random: 5 },
            measurements: MeasurementsSpec::Random {
                random_per_bob: 2,
                outcomes: None,
            },
            tolerances: Tolerances::default(),
            deviation_delta: 0.5,
            ssb: None,
        }
    }

    #[test]
    fn perfect_broadcast_certifies() {
        let scenario = broadcast_scenario(0.0, 3);
        let report = certify(&scenario, &RunConfig::default(), None).unwrap();
        assert_eq!(report.verdict, Verdict::Emerged);
        assert!((report.process_eta - 1.0).abs() < 1e-9);
        assert!((report.cutoff.p_hat - 0.75).abs() < 1e-6);
        assert_eq!(report.bobs.len(), 3);
        for bob in &report.bobs {
            assert!(bob.independence.independent);
            let model = bob
                .model
                .as_ref()
                .expect("independent encodings get a model");
            assert!(model.reproduction_passed);
            assert!(model.reproduction_max_residual <= 1e-10);
        }
        assert!((report.agreement.probability - 1.0).abs() < 1e-9);
    }

    #[test]
    fn depolarized_broadcast_is_not_certified() {
        let scenario = broadcast_scenario(1.0, 1);
        let report = certify(&scenario, &RunConfig::default(), None).unwrap();
        assert_eq!(report.verdict, Verdict::NotCertified);
        assert!((report.process_eta - 0.5).abs() < 1e-6);
        assert!(!report.bobs[0].independence.independent);
        assert!(report.bobs[0].model.is_none());
    }

    #[test]
    fn emerged_implies_models_for_every_bob() {
        for noise in [0.0, 0.1, 0.3] {
            let scenario = broadcast_scenario(noise, 2);
            let report = certify(&scenario, &RunConfig::default(), None).unwrap();
            if report.verdict == Verdict::Emerged {
                assert!(report.bobs.iter().all(|b| b.model.is_some()));
            }
        }
    }

    #[test]
    fn sweep_noise_grid() {
        let scenario = broadcast_scenario(0.0, 1);
        let table = sweep(
            &scenario,
            &RunConfig::default(),
            SweepParameter::Noise,
            0.0,
            1.0,
            11,
            None,
        )
        .unwrap();
        assert_eq!(table.rows.len(), 11);
        // η non-increasing along the grid.
        for pair in table.rows.windows(2) {
            assert!(pair[1].eta <= pair[0].eta + 1e-6);
        }
        let crossing = table.crossing.expect("η crosses P̂ inside the sweep");
        assert!(
            crossing.0 < 0.5 + 1e-9 && crossing.1 > 0.5 - 1e-9,
            "{crossing:?}"
        );
        // Last grid point is fully depolarized: encodings collapse.
        assert!(!table.rows.last().unwrap().independent);
        assert!(table.rows[..10].iter().all(|r| r.independent));
    }

    #[test]
    fn sweep_rejects_unknown_parameter_for_dynamics() {
        let scenario = broadcast_scenario(0.0, 1);
        let err = sweep(
            &scenario,
            &RunConfig::default(),
            SweepParameter::CouplingAngle,
            0.0,
            1.0,
            3,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, PipelineError::BadSweepParameter { .. }));
    }

    #[test]
    fn single_point_sweep_has_no_crossing() {
        let scenario = broadcast_scenario(0.2, 1);
        let table = sweep(
            &scenario,
            &RunConfig::default(),
            SweepParameter::Noise,
            0.2,
            0.2,
            1,
            None,
        )
        .unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!(table.crossing.is_none());
    }

    fn finite_env_scenario() -> Scenario {
        Scenario {
            name: "finite_env_sweep".into(),
            seed: 0,
            dynamics: DynamicsSpec::FiniteEnv {
                n: 2,
                s_t: vec![0],
                coupling_angle: crate::scenario::CouplingAngles::Uniform(0.3),
            },
            preparations: PreparationsSpec::Random { random: 3 },
            measurements: MeasurementsSpec::Random {
                random_per_bob: 2,
                outcomes: None,
            },
            tolerances: Tolerances::default(),
            deviation_delta: 0.5,
            ssb: None,
        }
    }

    #[test]
    fn coupling_sweep_diamond_column_shrinks_toward_full_coupling() {
        let table = sweep(
            &finite_env_scenario(),
            &RunConfig::default(),
            SweepParameter::CouplingAngle,
            0.0,
            std::f64::consts::FRAC_PI_2,
            9,
            None,
        )
        .unwrap();
        let diamonds: Vec<f64> = table
            .rows
            .iter()
            .map(|r| r.diamond_upper.expect("finite-env sweeps carry the column"))
            .collect();
        for pair in diamonds.windows(2) {
            assert!(
                pair[1] <= pair[0] + 1e-9,
                "diamond column not monotone: {diamonds:?}"
            );
        }
        assert!(diamonds.last().unwrap().abs() < 1e-9);
    }

    #[test]
    fn environment_size_sweep_runs() {
        let table = sweep(
            &finite_env_scenario(),
            &RunConfig::default(),
            SweepParameter::EnvironmentSize,
            2.0,
            4.0,
            3,
            None,
        )
        .unwrap();
        assert_eq!(table.rows.len(), 3);
        // The retained fragment's reduced channel is independent of how many
        // untouched qubits the environment holds.
        let first = table.rows[0].eta;
        for row in &table.rows {
            assert!((row.eta - first).abs() < 1e-9);
        }
    }
}
