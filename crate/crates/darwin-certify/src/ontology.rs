//! The explicit noncontextual ontological model for one observer.
//!
//! The ontic space is the pointer label set Λ = {1..k_max}. A preparation is
//! represented by μ_P(k) = Tr[E_k ρ_P] and an effect by ξ(b|k) = Tr[F_b σ_k].
//! Preparation noncontextuality is enforced structurally: μ is keyed by the
//! (quantized) pointer distribution — the operational equivalence class —
//! never by the preparation's identity. Measurement noncontextuality likewise:
//! ξ is keyed by a digest of the effect matrix alone.
//!
//! Construction requires the prepared states to be affinely independent;
//! without that hypothesis the model is refused (noncontextuality is then
//! not certified, not disproved).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::{ChannelError, MeasureAndPrepareChannel};
use crate::qmath::{DensityMatrix, HermitianMatrix, Povm, QmathError};
use crate::simplex::{is_affinely_independent, SimplexError, StateFamily};

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("prepared states are affinely dependent (difference rank {rank}, need {needed}); the model construction hypothesis fails")]
    AffinelyDependent { rank: usize, needed: usize },
    #[error("preparation key not present in the model")]
    UnknownPreparation,
    #[error("measurement index {index} not present in the model ({count} registered)")]
    UnknownMeasurement { index: usize, count: usize },
    #[error("outcome {outcome} out of range for measurement {measurement}")]
    UnknownOutcome { measurement: usize, outcome: usize },
    #[error("measurement {index} acts on dimension {found}, expected {expected}")]
    MeasurementDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error(transparent)]
    Qmath(#[from] QmathError),
    #[error("model file malformed: {0}")]
    Malformed(String),
}

/// Quantization grain for preparation keys: operationally equivalent
/// preparations collide structurally at this rounding.
const PREP_KEY_GRAIN: f64 = 1e-9;
/// Quantization grain for effect digests.
const EFFECT_KEY_GRAIN: f64 = 1e-12;

fn prep_key(distribution: &[f64]) -> Vec<i64> {
    distribution
        .iter()
        .map(|p| (p / PREP_KEY_GRAIN).round() as i64)
        .collect()
}

/// FNV-1a digest of the quantized effect entries, hex-encoded.
pub fn effect_digest(effect: &HermitianMatrix) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    let mut feed = |v: i64| {
        for byte in v.to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
    };
    let m = effect.matrix();
    feed(m.dim() as i64);
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            feed((m[(i, j)].re / EFFECT_KEY_GRAIN).round() as i64);
            feed((m[(i, j)].im / EFFECT_KEY_GRAIN).round() as i64);
        }
    }
    format!("{hash:016x}")
}

/// Noncontextual ontological model over Λ = {1..k_max}.
#[derive(Debug, Clone)]
pub struct OntologicalModel {
    k_max: usize,
    mu: BTreeMap<Vec<i64>, Vec<f64>>,
    xi: BTreeMap<String, Vec<f64>>,
    /// Outcome digests per registered measurement.
    measurement_outcomes: Vec<Vec<String>>,
    /// Pointer distribution of every registered preparation, in input order.
    prep_distributions: Vec<Vec<f64>>,
}

impl OntologicalModel {
    pub fn ontic_cardinality(&self) -> usize {
        self.k_max
    }

    pub fn mu_table(&self) -> &BTreeMap<Vec<i64>, Vec<f64>> {
        &self.mu
    }

    pub fn xi_table(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.xi
    }

    pub fn measurement_count(&self) -> usize {
        self.measurement_outcomes.len()
    }

    pub fn preparation_count(&self) -> usize {
        self.prep_distributions.len()
    }

    pub fn preparation_distribution(&self, index: usize) -> Option<&[f64]> {
        self.prep_distributions.get(index).map(|d| d.as_slice())
    }

    /// μ for an explicit pointer distribution; the lookup goes through the
    /// quantized equivalence-class key.
    pub fn mu(&self, distribution: &[f64]) -> Result<&[f64], OntologyError> {
        self.mu
            .get(&prep_key(distribution))
            .map(|v| v.as_slice())
            .ok_or(OntologyError::UnknownPreparation)
    }

    /// Response vector of a registered (measurement, outcome) pair.
    pub fn xi(&self, measurement: usize, outcome: usize) -> Result<&[f64], OntologyError> {
        let digests = self.measurement_outcomes.get(measurement).ok_or(
            OntologyError::UnknownMeasurement {
                index: measurement,
                count: self.measurement_outcomes.len(),
            },
        )?;
        let digest = digests.get(outcome).ok_or(OntologyError::UnknownOutcome {
            measurement,
            outcome,
        })?;
        Ok(self
            .xi
            .get(digest)
            .expect("registered digests always resolve")
            .as_slice())
    }

    /// p(b|M,P) = Σ_k μ_P(k)·ξ_M(b|k).
    pub fn predict(
        &self,
        distribution: &[f64],
        measurement: usize,
        outcome: usize,
    ) -> Result<f64, OntologyError> {
        let mu = self.mu(distribution)?;
        let xi = self.xi(measurement, outcome)?;
        Ok(mu.iter().zip(xi).map(|(m, x)| m * x).sum())
    }
}

/// Builds the model for one observer: μ from the pointer POVM, ξ from the
/// encoding states, after certifying the affine-independence hypothesis with
/// rank tolerance `rank_tol`.
pub fn build_nc_model(
    bob_channel: &MeasureAndPrepareChannel,
    preparations: &[DensityMatrix],
    measurements: &[Povm],
    rank_tol: f64,
) -> Result<OntologicalModel, OntologyError> {
    let family = StateFamily::new(bob_channel.prepared().to_vec())?;
    let report = is_affinely_independent(&family, rank_tol);
    if !report.independent {
        return Err(OntologyError::AffinelyDependent {
            rank: report.rank,
            needed: family.len() - 1,
        });
    }

    let k_max = bob_channel.outcome_count();
    let mut mu = BTreeMap::new();
    let mut prep_distributions = Vec::with_capacity(preparations.len());
    for rho in preparations {
        let dist = bob_channel.pointer_distribution(rho)?;
        mu.entry(prep_key(&dist)).or_insert_with(|| dist.clone());
        prep_distributions.push(dist);
    }

    let mut xi = BTreeMap::new();
    let mut measurement_outcomes = Vec::with_capacity(measurements.len());
    for (index, povm) in measurements.iter().enumerate() {
        if povm.dim() != bob_channel.output_dim() {
            return Err(OntologyError::MeasurementDimension {
                index,
                expected: bob_channel.output_dim(),
                found: povm.dim(),
            });
        }
        let mut digests = Vec::with_capacity(povm.len());
        for effect in povm.effects() {
            let digest = effect_digest(effect);
            xi.entry(digest.clone()).or_insert_with(|| {
                bob_channel
                    .prepared()
                    .iter()
                    .map(|sigma| effect.pair(sigma.hermitian()).clamp(0.0, 1.0))
                    .collect::<Vec<f64>>()
            });
            digests.push(digest);
        }
        measurement_outcomes.push(digests);
    }

    Ok(OntologicalModel {
        k_max,
        mu,
        xi,
        measurement_outcomes,
        prep_distributions,
    })
}

/// Outcome of replaying the operational statistics through the model.
#[derive(Debug, Clone)]
pub struct ReproductionReport {
    pub checked: usize,
    pub max_residual: f64,
    /// (preparation, measurement, outcome, residual) beyond tolerance.
    pub failures: Vec<(usize, usize, usize, f64)>,
}

impl ReproductionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks p(b|M,P) = Σ_k μ ξ against Tr[F_b Φ(ρ_P)] for every triple.
pub fn verify_reproduction(
    model: &OntologicalModel,
    bob_channel: &MeasureAndPrepareChannel,
    preparations: &[DensityMatrix],
    measurements: &[Povm],
    tol: f64,
) -> Result<ReproductionReport, OntologyError> {
    let mut report = ReproductionReport {
        checked: 0,
        max_residual: 0.0,
        failures: Vec::new(),
    };
    for (pi, rho) in preparations.iter().enumerate() {
        let dist = bob_channel.pointer_distribution(rho)?;
        let out = bob_channel.apply(rho)?;
        for (mi, povm) in measurements.iter().enumerate() {
            for (bi, effect) in povm.effects().iter().enumerate() {
                let predicted = model.predict(&dist, mi, bi)?;
                let operational = effect.pair(out.hermitian());
                let residual = (predicted - operational).abs();
                report.checked += 1;
                report.max_residual = report.max_residual.max(residual);
                if residual > tol {
                    report.failures.push((pi, mi, bi, residual));
                }
            }
        }
    }
    Ok(report)
}

/// Report of the preparation-equivalence check.
#[derive(Debug, Clone)]
pub struct ContextReport {
    pub pairs_checked: usize,
    /// (preparation i, preparation j, μ deviation) for operationally
    /// equivalent pairs whose μ differ beyond tolerance.
    pub failures: Vec<(usize, usize, f64)>,
}

impl ContextReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Verifies that registered preparations with pointer distributions equal
/// within `tol` carry identical μ (preparation noncontextuality, literally).
pub fn check_context_respect(model: &OntologicalModel, tol: f64) -> ContextReport {
    let mut report = ContextReport {
        pairs_checked: 0,
        failures: Vec::new(),
    };
    let dists = &model.prep_distributions;
    for i in 0..dists.len() {
        for j in (i + 1)..dists.len() {
            let equivalent = dists[i]
                .iter()
                .zip(&dists[j])
                .all(|(a, b)| (a - b).abs() <= tol);
            if !equivalent {
                continue;
            }
            report.pairs_checked += 1;
            let mu_i = model.mu(&dists[i]);
            let mu_j = model.mu(&dists[j]);
            if let (Ok(mi), Ok(mj)) = (mu_i, mu_j) {
                let dev = mi
                    .iter()
                    .zip(mj)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if dev > tol {
                    report.failures.push((i, j, dev));
                }
            }
        }
    }
    report
}

// ---------------------------------------------------------------------------
// Export / import
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct MuRow {
    pointer_distribution: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct XiRow {
    effect_digest: String,
    response: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MeasurementRow {
    outcomes: Vec<String>,
}

/// On-disk form of a model: μ keyed by pointer distribution, ξ keyed by
/// effect digest, values carried to 12 significant digits.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelDocument {
    ontic_space: Vec<usize>,
    mu: Vec<MuRow>,
    xi: Vec<XiRow>,
    measurements: Vec<MeasurementRow>,
    preparations: Vec<Vec<f64>>,
}

/// Rounds to 12 significant digits (export precision).
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(11 - mag);
    (x * scale).round() / scale
}

pub fn export_model(model: &OntologicalModel) -> ModelDocument {
    let sig = |v: &[f64]| v.iter().map(|x| round_sig12(*x)).collect::<Vec<f64>>();
    ModelDocument {
        ontic_space: (1..=model.k_max).collect(),
        mu: model
            .mu
            .iter()
            .map(|(key, dist)| MuRow {
                pointer_distribution: key
                    .iter()
                    .map(|q| round_sig12(*q as f64 * PREP_KEY_GRAIN))
                    .collect(),
                weights: sig(dist),
            })
            .collect(),
        xi: model
            .xi
            .iter()
            .map(|(digest, response)| XiRow {
                effect_digest: digest.clone(),
                response: sig(response),
            })
            .collect(),
        measurements: model
            .measurement_outcomes
            .iter()
            .map(|outcomes| MeasurementRow {
                outcomes: outcomes.clone(),
            })
            .collect(),
        preparations: model.prep_distributions.iter().map(|d| sig(d)).collect(),
    }
}

pub fn import_model(doc: &ModelDocument) -> Result<OntologicalModel, OntologyError> {
    let k_max = doc.ontic_space.len();
    if k_max == 0 {
        return Err(OntologyError::Malformed("empty ontic space".into()));
    }
    let mut mu = BTreeMap::new();
    for row in &doc.mu {
        if row.weights.len() != k_max {
            return Err(OntologyError::Malformed(format!(
                "mu row has {} weights, expected {k_max}",
                row.weights.len()
            )));
        }
        mu.insert(prep_key(&row.pointer_distribution), row.weights.clone());
    }
    let mut xi = BTreeMap::new();
    for row in &doc.xi {
        if row.response.len() != k_max {
            return Err(OntologyError::Malformed(format!(
                "xi row has {} entries, expected {k_max}",
                row.response.len()
            )));
        }
        xi.insert(row.effect_digest.clone(), row.response.clone());
    }
    for (i, m) in doc.measurements.iter().enumerate() {
        for d in &m.outcomes {
            if !xi.contains_key(d) {
                return Err(OntologyError::Malformed(format!(
                    "measurement {i} references unknown digest {d}"
                )));
            }
        }
    }
    Ok(OntologicalModel {
        k_max,
        mu,
        xi,
        measurement_outcomes: doc
            .measurements
            .iter()
            .map(|m| m.outcomes.clone())
            .collect(),
        prep_distributions: doc.preparations.clone(),
    })
}
