//! Scenario files: the CLI's input format.
//!
//! Scenarios are UTF-8 JSON with complex entries spelled as (re, im) pairs in
//! row-major order. Canonical dynamics families (broadcast, finite_env) are
//! accepted as shorthand next to fully explicit measure-and-prepare channels.
//! A single 64-bit seed governs every random draw (preparations, measurement
//! sets, solver starts), so a scenario file pins its outputs byte-for-byte.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::{
    finite_env_channel, make_broadcast, BroadcastSpec, ChannelError, FiniteEnvSpec,
    MeasureAndPrepareChannel,
};
use crate::qmath::{pinv_sqrt, CMatrix, DensityMatrix, HermitianMatrix, Povm, QmathError, C64};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
    #[error("{location}: {source}")]
    InvalidMatrix {
        location: String,
        #[source]
        source: QmathError,
    },
    #[error("{location}: {source}")]
    InvalidChannel {
        location: String,
        #[source]
        source: ChannelError,
    },
}

fn invalid(location: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        location: location.into(),
        message: message.into(),
    }
}

/// Complex matrix as (re, im) pairs, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<(f64, f64)>,
}

impl MatrixJson {
    pub fn from_cmatrix(m: &CMatrix) -> Self {
        let dim = m.dim();
        let entries = (0..dim * dim)
            .map(|idx| {
                let v = m.data()[idx];
                (v.re, v.im)
            })
            .collect();
        MatrixJson { dim, entries }
    }

    pub fn to_cmatrix(&self, location: &str) -> Result<CMatrix, ScenarioError> {
        if self.entries.len() != self.dim * self.dim {
            return Err(invalid(
                location,
                format!(
                    "matrix of dim {} needs {} entries, found {}",
                    self.dim,
                    self.dim * self.dim,
                    self.entries.len()
                ),
            ));
        }
        let data: Vec<C64> = self
            .entries
            .iter()
            .map(|(re, im)| C64::new(*re, *im))
            .collect();
        CMatrix::from_row_major(self.dim, data).map_err(|source| ScenarioError::InvalidMatrix {
            location: location.to_string(),
            source,
        })
    }

    pub fn to_density(&self, location: &str) -> Result<DensityMatrix, ScenarioError> {
        DensityMatrix::from_cmatrix(self.to_cmatrix(location)?).map_err(|source| {
            ScenarioError::InvalidMatrix {
                location: location.to_string(),
                source,
            }
        })
    }

    pub fn to_hermitian(&self, location: &str) -> Result<HermitianMatrix, ScenarioError> {
        HermitianMatrix::new(self.to_cmatrix(location)?).map_err(|source| {
            ScenarioError::InvalidMatrix {
                location: location.to_string(),
                source,
            }
        })
    }
}

/// POVM as a list of effect matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmJson {
    pub effects: Vec<MatrixJson>,
}

impl PovmJson {
    pub fn from_povm(p: &Povm) -> Self {
        PovmJson {
            effects: p
                .effects()
                .iter()
                .map(|e| MatrixJson::from_cmatrix(e.matrix()))
                .collect(),
        }
    }

    pub fn to_povm(&self, location: &str) -> Result<Povm, ScenarioError> {
        let effects = self
            .effects
            .iter()
            .enumerate()
            .map(|(i, m)| m.to_hermitian(&format!("{location}.effects[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        Povm::measurement(effects).map_err(|source| ScenarioError::InvalidMatrix {
            location: location.to_string(),
            source,
        })
    }
}

/// Dynamics declaration: a canonical family or an explicit channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DynamicsSpec {
    Broadcast {
        d_a: usize,
        t: usize,
        noise: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bob_dims: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pointer_basis: Option<MatrixJson>,
    },
    FiniteEnv {
        n: usize,
        s_t: Vec<usize>,
        coupling_angle: CouplingAngles,
    },
    Explicit {
        d_a: usize,
        bob_dims: Vec<usize>,
        pointer: Vec<MatrixJson>,
        prepared: Vec<MatrixJson>,
    },
}

/// One shared angle or one per environment qubit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CouplingAngles {
    Uniform(f64),
    PerQubit(Vec<f64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PreparationsSpec {
    Random { random: usize },
    Explicit { explicit: Vec<MatrixJson> },
}

impl Default for PreparationsSpec {
    fn default() -> Self {
        PreparationsSpec::Random { random: 10 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasurementsSpec {
    Random {
        random_per_bob: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        outcomes: Option<usize>,
    },
    Explicit {
        explicit: Vec<Vec<PovmJson>>,
    },
}

impl Default for MeasurementsSpec {
    fn default() -> Self {
        MeasurementsSpec::Random {
            random_per_bob: 3,
            outcomes: None,
        }
    }
}

/// Solver/certificate/rank tolerances, overridable per scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Certificate gap required of optimization solvers.
    pub certificate: f64,
    /// Inner fixed-point solver tolerance.
    pub solver: f64,
    /// Singular-value threshold for affine-independence decisions.
    pub rank: f64,
    /// Residual allowed when replaying statistics through a model.
    pub reproduction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            certificate: 1e-6,
            solver: 1e-9,
            rank: 1e-8,
            reproduction: 1e-10,
        }
    }
}

/// Declares that the dynamics' output includes the post-interaction system
/// as its leading factor, with the given environment factor dimensions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsbDeclaration {
    pub env_dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointer_basis: Option<MatrixJson>,
    /// Support-disjointness tolerance.
    #[serde(default = "default_ssb_tol")]
    pub tol: f64,
}

fn default_ssb_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub dynamics: DynamicsSpec,
    #[serde(default)]
    pub preparations: PreparationsSpec,
    #[serde(default)]
    pub measurements: MeasurementsSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Fraction parameter of the finite-environment deviation bound.
    #[serde(default = "default_deviation_delta")]
    pub deviation_delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ssb: Option<SsbDeclaration>,
}

fn default_deviation_delta() -> f64 {
    0.5
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let scenario: Scenario =
            serde_json::from_str(&text).map_err(|source| ScenarioError::Parse {
                path: path.display().to_string(),
                source,
            })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(0.0..1.0).contains(&self.deviation_delta) || self.deviation_delta == 0.0 {
            return Err(invalid(
                "deviation_delta",
                format!("{} outside (0, 1)", self.deviation_delta),
            ));
        }
        for (name, v) in [
            ("tolerances.certificate", self.tolerances.certificate),
            ("tolerances.solver", self.tolerances.solver),
            ("tolerances.rank", self.tolerances.rank),
            ("tolerances.reproduction", self.tolerances.reproduction),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(invalid(name, format!("{v} outside (0, 1)")));
            }
        }
        // Explicit components get a full structural pass.
        let (channel, bob_dims) = self.build_channel()?;
        if let MeasurementsSpec::Explicit { explicit } = &self.measurements {
            if explicit.len() != bob_dims.len() {
                return Err(invalid(
                    "measurements.explicit",
                    format!(
                        "{} per-observer lists for {} observers",
                        explicit.len(),
                        bob_dims.len()
                    ),
                ));
            }
            for (j, povms) in explicit.iter().enumerate() {
                for (m, povm) in povms.iter().enumerate() {
                    let built = povm.to_povm(&format!("measurements.explicit[{j}][{m}]"))?;
                    if built.dim() != bob_dims[j] {
                        return Err(invalid(
                            format!("measurements.explicit[{j}][{m}]"),
                            format!(
                                "acts on dimension {}, observer {} has dimension {}",
                                built.dim(),
                                j,
                                bob_dims[j]
                            ),
                        ));
                    }
                }
            }
        }
        if let PreparationsSpec::Explicit { explicit } = &self.preparations {
            for (i, m) in explicit.iter().enumerate() {
                let rho = m.to_density(&format!("preparations.explicit[{i}]"))?;
                if rho.dim() != channel.input_dim() {
                    return Err(invalid(
                        format!("preparations.explicit[{i}]"),
                        format!(
                            "dimension {} does not match the system dimension {}",
                            rho.dim(),
                            channel.input_dim()
                        ),
                    ));
                }
            }
        }
        if let Some(ssb) = &self.ssb {
            let product: usize = ssb.env_dims.iter().product();
            let expected = channel.input_dim() * product;
            if channel.output_dim() != expected {
                return Err(invalid(
                    "ssb.env_dims",
                    format!(
                        "joint output dimension {} does not factor as d_A × env = {}",
                        channel.output_dim(),
                        expected
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Builds the declared channel and the observer factorization of its
    /// output space.
    pub fn build_channel(&self) -> Result<(MeasureAndPrepareChannel, Vec<usize>), ScenarioError> {
        match &self.dynamics {
            DynamicsSpec::Broadcast {
                d_a,
                t,
                noise,
                bob_dims,
                pointer_basis,
            } => {
                let dims = bob_dims.clone().unwrap_or_else(|| vec![*d_a; *t]);
                let basis = match pointer_basis {
                    Some(m) => m.to_cmatrix("dynamics.pointer_basis")?,
                    None => CMatrix::identity(*d_a),
                };
                let spec = BroadcastSpec {
                    d_a: *d_a,
                    t: *t,
                    bob_dims: dims.clone(),
                    noise: *noise,
                    pointer_basis: basis,
                };
                let channel =
                    make_broadcast(&spec).map_err(|source| ScenarioError::InvalidChannel {
                        location: "dynamics".into(),
                        source,
                    })?;
                Ok((channel, dims))
            }
            DynamicsSpec::FiniteEnv {
                n,
                s_t,
                coupling_angle,
            } => {
                let spec = self.finite_env_spec(*n, s_t, coupling_angle)?;
                let channel =
                    finite_env_channel(&spec).map_err(|source| ScenarioError::InvalidChannel {
                        location: "dynamics".into(),
                        source,
                    })?;
                Ok((channel, vec![2; s_t.len()]))
            }
            DynamicsSpec::Explicit {
                d_a,
                bob_dims,
                pointer,
                prepared,
            } => {
                let effects = pointer
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        let e = m.to_hermitian(&format!("dynamics.pointer[{i}]"))?;
                        if e.dim() != *d_a {
                            return Err(invalid(
                                format!("dynamics.pointer[{i}]"),
                                format!("dimension {} but d_a = {d_a}", e.dim()),
                            ));
                        }
                        Ok(e)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let pointer_povm =
                    Povm::new(effects).map_err(|source| ScenarioError::InvalidMatrix {
                        location: "dynamics.pointer".into(),
                        source,
                    })?;
                let states = prepared
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m.to_density(&format!("dynamics.prepared[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let channel =
                    MeasureAndPrepareChannel::new(pointer_povm, states).map_err(|source| {
                        ScenarioError::InvalidChannel {
                            location: "dynamics".into(),
                            source,
                        }
                    })?;
                let product: usize = bob_dims.iter().product();
                if product != channel.output_dim() {
                    return Err(invalid(
                        "dynamics.bob_dims",
                        format!(
                            "product {} does not match the prepared dimension {}",
                            product,
                            channel.output_dim()
                        ),
                    ));
                }
                Ok((channel, bob_dims.clone()))
            }
        }
    }

    pub fn finite_env_spec(
        &self,
        n: usize,
        s_t: &[usize],
        coupling: &CouplingAngles,
    ) -> Result<FiniteEnvSpec, ScenarioError> {
        let angles = match coupling {
            CouplingAngles::Uniform(a) => vec![*a; n],
            CouplingAngles::PerQubit(v) => v.clone(),
        };
        let spec = FiniteEnvSpec {
            d_a: 2,
            n,
            s_t: s_t.to_vec(),
            coupling_angles: angles,
        };
        spec.validate()
            .map_err(|source| ScenarioError::InvalidChannel {
                location: "dynamics".into(),
                source,
            })?;
        Ok(spec)
    }

    /// Materializes the preparation list (drawing from the scenario seed when
    /// random).
    pub fn build_preparations(
        &self,
        system_dim: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<DensityMatrix>, ScenarioError> {
        match &self.preparations {
            PreparationsSpec::Random { random } => Ok((0..*random)
                .map(|_| random_density(system_dim, rng))
                .collect()),
            PreparationsSpec::Explicit { explicit } => explicit
                .iter()
                .enumerate()
                .map(|(i, m)| m.to_density(&format!("preparations.explicit[{i}]")))
                .collect(),
        }
    }

    /// Materializes the per-observer measurement lists.
    pub fn build_measurements(
        &self,
        bob_dims: &[usize],
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Vec<Povm>>, ScenarioError> {
        match &self.measurements {
            MeasurementsSpec::Random {
                random_per_bob,
                outcomes,
            } => Ok(bob_dims
                .iter()
                .map(|&dim| {
                    (0..*random_per_bob)
                        .map(|_| random_povm(dim, outcomes.unwrap_or(dim), rng))
                        .collect()
                })
                .collect()),
            MeasurementsSpec::Explicit { explicit } => explicit
                .iter()
                .enumerate()
                .map(|(j, povms)| {
                    povms
                        .iter()
                        .enumerate()
                        .map(|(m, p)| p.to_povm(&format!("measurements.explicit[{j}][{m}]")))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn rng(&self, seed_override: Option<u64>) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed_override.unwrap_or(self.seed))
    }
}

/// Random full-rank density matrix (Gram construction).
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let gram = g.matmul(&g.adjoint());
    DensityMatrix::from_cmatrix(gram.scale_re(1.0 / gram.trace().re))
        .expect("Gram construction yields a valid state")
}

/// Random POVM: Gram matrices normalized through the inverse square root of
/// their sum.
pub fn random_povm(dim: usize, outcomes: usize, rng: &mut ChaCha8Rng) -> Povm {
    let mut gs: Vec<CMatrix> = (0..outcomes.max(1))
        .map(|_| {
            let g = CMatrix::from_fn(dim, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            g.matmul(&g.adjoint())
        })
        .collect();
    let total = gs.iter().fold(CMatrix::zeros(dim), |acc, g| acc.add(g));
    let isq = pinv_sqrt(&total, 1e-12);
    for g in gs.iter_mut() {
        *g = isq.matmul(g).matmul(&isq).symmetrize();
    }
    Povm::measurement(
        gs.into_iter()
            .map(|g| HermitianMatrix::new(g).expect("normalized Gram blocks are Hermitian"))
            .collect(),
    )
    .expect("normalized Gram blocks form a POVM")
}

/// On-disk channel form (import/export round-trips within 1e-12).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelDocument {
    pub d_a: usize,
    pub bob_dims: Vec<usize>,
    pub pointer: Vec<MatrixJson>,
    pub prepared: Vec<MatrixJson>,
}

pub fn export_channel(channel: &MeasureAndPrepareChannel, bob_dims: &[usize]) -> ChannelDocument {
    ChannelDocument {
        d_a: channel.input_dim(),
        bob_dims: bob_dims.to_vec(),
        pointer: channel
            .pointer()
            .effects()
            .iter()
            .map(|e| MatrixJson::from_cmatrix(e.matrix()))
            .collect(),
        prepared: channel
            .prepared()
            .iter()
            .map(|s| MatrixJson::from_cmatrix(s.matrix()))
            .collect(),
    }
}

pub fn import_channel(
    doc: &ChannelDocument,
) -> Result<(MeasureAndPrepareChannel, Vec<usize>), ScenarioError> {
    let effects = doc
        .pointer
        .iter()
        .enumerate()
        .map(|(i, m)| m.to_hermitian(&format!("pointer[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let pointer = Povm::new(effects).map_err(|source| ScenarioError::InvalidMatrix {
        location: "pointer".into(),
        source,
    })?;
    let prepared = doc
        .prepared
        .iter()
        .enumerate()
        .map(|(i, m)| m.to_density(&format!("prepared[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let channel = MeasureAndPrepareChannel::new(pointer, prepared).map_err(|source| {
        ScenarioError::InvalidChannel {
            location: "channel".into(),
            source,
        }
    })?;
    Ok((channel, doc.bob_dims.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn broadcast_scenario(noise: f64) -> Scenario {
        Scenario {
            name: "test".into(),
            seed: 7,
            dynamics: DynamicsSpec::Broadcast {
                d_a: 2,
                t: 2,
                noise,
                bob_dims: None,
                pointer_basis: None,
            },
            preparations: PreparationsSpec::Random { random: 4 },
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
    fn broadcast_scenario_builds() {
        let s = broadcast_scenario(0.25);
        s.validate().unwrap();
        let (chan, dims) = s.build_channel().unwrap();
        assert_eq!(dims, vec![2, 2]);
        assert_eq!(chan.outcome_count(), 2);
        let mut rng = s.rng(None);
        let preps = s.build_preparations(chan.input_dim(), &mut rng).unwrap();
        assert_eq!(preps.len(), 4);
        let meas = s.build_measurements(&dims, &mut rng).unwrap();
        assert_eq!(meas.len(), 2);
        assert_eq!(meas[0].len(), 2);
    }

    #[test]
    fn seeding_is_reproducible() {
        let s = broadcast_scenario(0.1);
        let mut r1 = s.rng(None);
        let mut r2 = s.rng(None);
        let a = random_density(2, &mut r1);
        let b = random_density(2, &mut r2);
        assert!(a.matrix().max_abs_diff(b.matrix()) == 0.0);
        let c = random_density(2, &mut s.rng(Some(8)));
        assert!(a.matrix().max_abs_diff(c.matrix()) > 1e-3);
    }

    #[test]
    fn json_roundtrip_and_shorthand_parse() {
        let text = r#"{
            "name": "roundtrip",
            "seed": 3,
            "dynamics": {"kind": "finite_env", "n": 2, "s_t": [0], "coupling_angle": 0.7},
            "preparations": {"random": 5},
            "measurements": {"random_per_bob": 2}
        }"#;
        let s: Scenario = serde_json::from_str(text).unwrap();
        s.validate().unwrap();
        let (chan, dims) = s.build_channel().unwrap();
        assert_eq!(dims, vec![2]);
        assert_eq!(chan.input_dim(), 2);
        let back = serde_json::to_string(&s).unwrap();
        let s2: Scenario = serde_json::from_str(&back).unwrap();
        s2.validate().unwrap();
    }

    #[test]
    fn malformed_povm_is_named() {
        // Effects do not sum to identity.
        let text = r#"{
            "name": "bad",
            "dynamics": {
                "kind": "explicit",
                "d_a": 2,
                "bob_dims": [2],
                "pointer": [
                    {"dim": 2, "entries": [[1,0],[0,0],[0,0],[0,0]]},
                    {"dim": 2, "entries": [[0.5,0],[0,0],[0,0],[0.5,0]]}
                ],
                "prepared": [
                    {"dim": 2, "entries": [[1,0],[0,0],[0,0],[0,0]]},
                    {"dim": 2, "entries": [[0,0],[0,0],[0,0],[1,0]]}
                ]
            }
        }"#;
        let s: Scenario = serde_json::from_str(text).unwrap();
        let err = s.validate().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("pointer"), "{msg}");
        assert!(msg.contains("identity"), "{msg}");
    }

    #[test]
    fn channel_document_roundtrip() {
        let s = broadcast_scenario(0.33);
        let (chan, dims) = s.build_channel().unwrap();
        let doc = export_channel(&chan, &dims);
        let json = serde_json::to_string(&doc).unwrap();
        let parsed: ChannelDocument = serde_json::from_str(&json).unwrap();
        let (back, dims2) = import_channel(&parsed).unwrap();
        assert_eq!(dims, dims2);
        for (a, b) in chan.prepared().iter().zip(back.prepared()) {
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);
        }
        for (a, b) in chan
            .pointer()
            .effects()
            .iter()
            .zip(back.pointer().effects())
        {
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);
        }
    }
}
